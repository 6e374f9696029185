#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gframelab/duals.hpp"

// Deterministic fixture builders, seeded scenario generators, and the
// scenario file format. Everything here is a pure function of (parameters,
// seed); files round-trip losslessly.

namespace gframelab {

inline constexpr int kScenarioFormatVersion = 1;

/// A complete, self-consistent experiment: measure space, family (or pair),
/// controllers, and the metadata needed to reproduce it.
struct Scenario {
    MeasureSpace space;
    GFrameFamily lambda_family;
    std::optional<GFrameFamily> gamma_family;
    Controller p;
    Controller q;
    std::uint64_t seed = 0;
    std::string label;
};

/// The [0, 2pi] fixture: N midpoint nodes, d_w = 1, Lambda_w = (cos w, sin w)
/// as a row. The midpoint rule integrates cos^2, sin^2 and cos*sin exactly
/// for N >= 3, so the frame operator is pi * I to machine precision.
inline Scenario example_1_5(std::size_t n_nodes, Controller p, Controller q) {
    if (n_nodes < 2) throw BadInterval("example_1_5: need at least 2 nodes");
    if (p.dim() != 2 || q.dim() != 2)
        throw BadControllers("example_1_5: controllers must be 2x2 positive definite");
    const MeasureSpace space = uniform_interval_space(0.0, 2.0 * M_PI, n_nodes, 1);
    std::vector<Mat> blocks;
    blocks.reserve(n_nodes);
    for (std::size_t k = 0; k < n_nodes; ++k) {
        const double w = interval_midpoint(0.0, 2.0 * M_PI, n_nodes, k);
        Mat row(1, 2);
        row << Complex(std::cos(w), 0.0), Complex(std::sin(w), 0.0);
        blocks.push_back(std::move(row));
    }
    GFrameFamily family(space, 2, std::move(blocks));
    return Scenario{space, std::move(family), std::nullopt, std::move(p), std::move(q),
                    0, "example-1.5-N" + std::to_string(n_nodes)};
}

/// Family with seeded standard complex Gaussian blocks.
inline GFrameFamily random_gframe(Eigen::Index ambient_dim,
                                  const std::vector<Eigen::Index>& dims,
                                  const std::vector<double>& weights, std::uint64_t seed) {
    MeasureSpace space(weights, dims);
    Rng rng(seed);
    std::vector<Mat> blocks;
    blocks.reserve(space.size());
    for (std::size_t w = 0; w < space.size(); ++w)
        blocks.push_back(rng.gaussian_matrix(space.dim(w), ambient_dim));
    return GFrameFamily(std::move(space), ambient_dim, std::move(blocks));
}

/// Controller V D V* with D log-uniform in [1, condition_target] and V either
/// Haar-random or the eigenbasis of `commuting_with` (which forces
/// commutation with that operator).
inline Controller random_controller(Eigen::Index n, double condition_target,
                                    std::uint64_t seed,
                                    const std::optional<Mat>& commuting_with = std::nullopt) {
    if (condition_target < 1.0)
        throw BadControllers("random_controller: condition target must be >= 1");
    Rng rng(seed);
    Mat v;
    if (commuting_with) {
        if (commuting_with->rows() != n || commuting_with->cols() != n)
            throw DimensionMismatch("random_controller: commuting_with must be n x n");
        v = hermitian_eigendecomposition(*commuting_with).eigenvectors;
    } else {
        v = random_unitary(n, rng);
    }
    RealVec d(n);
    const double log_cond = std::log(condition_target);
    for (Eigen::Index i = 0; i < n; ++i) d(i) = std::exp(rng.uniform01() * log_cond);
    return Controller(hermitian_part(v * d.asDiagonal() * v.adjoint()));
}

// ---- serialization ----------------------------------------------------------

namespace detail {

inline nlohmann::json matrix_to_json(const Mat& m) {
    nlohmann::json entries = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            entries.push_back({m(i, j).real(), m(i, j).imag()});
    return nlohmann::json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

inline Mat matrix_from_json(const nlohmann::json& j, const std::string& what) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("entries"))
        throw FormatError(what + ": matrix object must carry rows/cols/entries");
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto& entries = j.at("entries");
    if (rows < 1 || cols < 1 || !entries.is_array() ||
        entries.size() != static_cast<std::size_t>(rows * cols))
        throw FormatError(what + ": entry count does not match rows*cols");
    Mat m(rows, cols);
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j2 = 0; j2 < cols; ++j2, ++k) {
            const auto& e = entries[k];
            if (!e.is_array() || e.size() != 2)
                throw FormatError(what + ": entries must be [re, im] pairs");
            m(i, j2) = Complex(e[0].get<double>(), e[1].get<double>());
        }
    if (!m.allFinite()) throw FormatError(what + ": non-finite entries");
    return m;
}

inline nlohmann::json family_to_json(const GFrameFamily& fam) {
    nlohmann::json blocks = nlohmann::json::array();
    for (const Mat& b : fam.blocks) blocks.push_back(matrix_to_json(b));
    return blocks;
}

inline GFrameFamily family_from_json(const nlohmann::json& j, const MeasureSpace& space,
                                     Eigen::Index ambient_dim, const std::string& what) {
    if (!j.is_array() || j.size() != space.size())
        throw FormatError(what + ": one block per node required");
    std::vector<Mat> blocks;
    blocks.reserve(j.size());
    for (std::size_t w = 0; w < j.size(); ++w)
        blocks.push_back(matrix_from_json(j[w], what + "[" + std::to_string(w) + "]"));
    try {
        return GFrameFamily(space, ambient_dim, std::move(blocks));
    } catch (const Error& e) {
        throw FormatError(what + ": " + e.what());
    }
}

}  // namespace detail

inline nlohmann::json scenario_to_json(const Scenario& s) {
    nlohmann::json j;
    j["format"] = "gframe-lab/scenario";
    j["format_version"] = kScenarioFormatVersion;
    j["label"] = s.label;
    j["seed"] = s.seed;
    j["ambient_dim"] = s.lambda_family.ambient_dim;
    j["space"] = {{"weights", s.space.weights()}, {"block_dims", s.space.block_dims()}};
    j["lambda"] = detail::family_to_json(s.lambda_family);
    if (s.gamma_family)
        j["gamma"] = detail::family_to_json(*s.gamma_family);
    else
        j["gamma"] = nullptr;
    j["P"] = detail::matrix_to_json(s.p.matrix());
    j["Q"] = detail::matrix_to_json(s.q.matrix());
    return j;
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw FormatError("scenario: top level must be an object");
    if (!j.contains("format_version") ||
        j.at("format_version").get<int>() != kScenarioFormatVersion)
        throw FormatError("scenario: missing or unsupported format_version");
    for (const char* key : {"label", "seed", "ambient_dim", "space", "lambda", "P", "Q"})
        if (!j.contains(key)) throw FormatError(std::string("scenario: missing key ") + key);

    const auto& jspace = j.at("space");
    if (!jspace.contains("weights") || !jspace.contains("block_dims"))
        throw FormatError("scenario: space must carry weights and block_dims");
    MeasureSpace space = [&] {
        try {
            return MeasureSpace(jspace.at("weights").get<std::vector<double>>(),
                                jspace.at("block_dims").get<std::vector<Eigen::Index>>());
        } catch (const Error& e) {
            throw FormatError(std::string("scenario: invalid measure space: ") + e.what());
        }
    }();

    const auto ambient_dim = j.at("ambient_dim").get<Eigen::Index>();
    GFrameFamily lambda = detail::family_from_json(j.at("lambda"), space, ambient_dim, "lambda");
    std::optional<GFrameFamily> gamma;
    if (j.contains("gamma") && !j.at("gamma").is_null())
        gamma = detail::family_from_json(j.at("gamma"), space, ambient_dim, "gamma");

    const auto make_controller = [&](const char* key) {
        try {
            return Controller(detail::matrix_from_json(j.at(key), key));
        } catch (const FormatError&) {
            throw;
        } catch (const Error& e) {
            throw FormatError(std::string("scenario: ") + key +
                              " is not a valid controller: " + e.what());
        }
    };
    Controller p = make_controller("P");
    Controller q = make_controller("Q");

    return Scenario{std::move(space), std::move(lambda), std::move(gamma),
                    std::move(p), std::move(q), j.at("seed").get<std::uint64_t>(),
                    j.at("label").get<std::string>()};
}

inline void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("save_scenario: cannot open " + path + " for writing");
    out << scenario_to_json(s).dump(2) << "\n";
    if (!out) throw IoError("save_scenario: write to " + path + " failed");
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_scenario: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("load_scenario: " + path + ": " + e.what());
    }
    return scenario_from_json(j);
}

/// Structural equality (exact on every number).
inline bool scenarios_equal(const Scenario& a, const Scenario& b) {
    if (!(a.space == b.space) || a.label != b.label || a.seed != b.seed) return false;
    if (a.lambda_family.ambient_dim != b.lambda_family.ambient_dim) return false;
    for (std::size_t w = 0; w < a.space.size(); ++w)
        if (a.lambda_family.blocks[w] != b.lambda_family.blocks[w]) return false;
    if (a.gamma_family.has_value() != b.gamma_family.has_value()) return false;
    if (a.gamma_family)
        for (std::size_t w = 0; w < a.space.size(); ++w)
            if (a.gamma_family->blocks[w] != b.gamma_family->blocks[w]) return false;
    return a.p.matrix() == b.p.matrix() && a.q.matrix() == b.q.matrix();
}

}  // namespace gframelab
