#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gframelab/controlled.hpp"

// Controlled continuous dual g-frames: the dual frame operator, duality
// certificates, the four equivalent reconstruction conditions, canonical
// duals, the kernel parametrization of all duals, and the left-inverse
// characterization of duality.

namespace gframelab {

inline constexpr double kDualTol = 1e-8;      // verdict tolerance on ||S - I||
inline constexpr double kKernelTol = 1e-10;   // ||T_{PLambdaP} T|| acceptance
inline constexpr int kCertificateSamples = 64;
inline constexpr std::uint64_t kCertificateSeed = 20240901;

struct DualityOptions {
    double dual_tol = kDualTol;
    int samples = kCertificateSamples;
    std::uint64_t seed = kCertificateSeed;
};

/// S_{CLambdaC} = C S_Lambda C for a single controller (Hermitian for free).
inline Mat self_controlled_operator(const GFrameFamily& fam, const Controller& c) {
    require_controller_dim(fam, c, "self_controlled_operator");
    return c.matrix() * frame_operator(fam) * c.matrix();
}

/// S_{PLambdaGammaQ} = P S_{LambdaGamma} Q.
inline Mat dual_frame_operator(const GFrameFamily& lambda, const GFrameFamily& gamma,
                               const Controller& p, const Controller& q) {
    require_controller_dim(lambda, p, "dual_frame_operator");
    require_controller_dim(lambda, q, "dual_frame_operator");
    return p.matrix() * mixed_frame_operator(lambda, gamma) * q.matrix();
}

/// sum_w mu_w <Lambda_w P f, Gamma_w Q g>.
inline Complex controlled_bilinear_form(const GFrameFamily& lambda, const GFrameFamily& gamma,
                                        const Controller& p, const Controller& q,
                                        const Vec& f, const Vec& g) {
    const Vec pf = p.matrix() * f;
    const Vec qg = q.matrix() * g;
    Complex acc(0.0, 0.0);
    for (std::size_t w = 0; w < lambda.space.size(); ++w) {
        const Vec left = lambda.blocks[w] * pf;
        const Vec right = gamma.blocks[w] * qg;
        acc += lambda.space.weight(w) * right.dot(left);
    }
    return acc;
}

/// Duality verdict for the pair (Lambda, Gamma) under (P, Q): residual of
/// S_{PLambdaGammaQ} against the identity, the four reconstruction-condition
/// residuals, sigma_min, and the lower bounds the bounded-below inference yields.
struct DualCertificate {
    double residual = 0.0;                      // ||S_{PLGQ} - I||
    bool is_dual = false;
    std::array<double, 4> condition_checks{};   // conditions (1)..(4)
    double lambda_min = 0.0;                    // sigma_min(S_{PLGQ})
    double inferred_lower_gamma = 0.0;          // lambda^2 / B_Lambda
    double inferred_lower_lambda = 0.0;         // lambda^2 / B_Gamma
    double dual_tol = kDualTol;
    int samples = 0;
    std::uint64_t seed = 0;
};

inline DualCertificate check_duality(const GFrameFamily& lambda, const GFrameFamily& gamma,
                                     const Controller& p, const Controller& q,
                                     const DualityOptions& opts = {}) {
    const Mat s_fwd = dual_frame_operator(lambda, gamma, p, q);
    const Mat s_rev = dual_frame_operator(gamma, lambda, q, p);
    const Mat eye = Mat::Identity(lambda.ambient_dim, lambda.ambient_dim);

    DualCertificate cert;
    cert.dual_tol = opts.dual_tol;
    cert.samples = opts.samples;
    cert.seed = opts.seed;
    cert.residual = operator_norm(s_fwd - eye);
    cert.condition_checks[0] = cert.residual;
    cert.condition_checks[1] = operator_norm(s_rev - eye);

    Rng rng(opts.seed);
    double c3 = 0.0, c4 = 0.0;
    for (int i = 0; i < opts.samples; ++i) {
        const Vec f = rng.unit_vector(lambda.ambient_dim);
        const Vec g = rng.unit_vector(lambda.ambient_dim);
        const Complex pairing = controlled_bilinear_form(lambda, gamma, p, q, f, g);
        c3 = std::max(c3, std::abs(g.dot(f) - pairing));
        const Complex energy = controlled_bilinear_form(lambda, gamma, p, q, f, f);
        c4 = std::max(c4, std::abs(Complex(f.squaredNorm(), 0.0) - energy));
    }
    cert.condition_checks[2] = c3;
    cert.condition_checks[3] = c4;

    cert.lambda_min = smallest_singular_value(s_fwd);
    const double b_lambda = operator_norm(self_controlled_operator(lambda, p));
    const double b_gamma = operator_norm(self_controlled_operator(gamma, q));
    cert.inferred_lower_gamma = b_lambda > 0.0 ? cert.lambda_min * cert.lambda_min / b_lambda : 0.0;
    cert.inferred_lower_lambda = b_gamma > 0.0 ? cert.lambda_min * cert.lambda_min / b_gamma : 0.0;

    double worst = 0.0;
    for (double c : cert.condition_checks) worst = std::max(worst, c);
    cert.is_dual = worst <= opts.dual_tol;
    return cert;
}

inline void require_bessel_pair(const GFrameFamily& lambda, const GFrameFamily& gamma,
                                const Controller& p, const Controller& q, const char* who) {
    const ControlledReport rl = controlled_bounds(lambda, p, p);
    const ControlledReport rg = controlled_bounds(gamma, q, q);
    if (rl.verdict == ControlledVerdict::Fail)
        throw BesselPreconditionFailed(std::string(who) +
                                       ": Lambda is not a (P,P)-controlled Bessel family");
    if (rg.verdict == ControlledVerdict::Fail)
        throw BesselPreconditionFailed(std::string(who) +
                                       ": Gamma is not a (Q,Q)-controlled Bessel family");
}

/// Audit of the four equivalent reconstruction conditions: they must agree in
/// verdict (all pass or all fail together), and the bilinear pairing must be
/// recoverable from the quadratic data by polarization on complex samples.
struct ReconstructionAudit {
    std::array<double, 4> residuals{};
    bool unanimous = false;
    bool all_pass = false;
    double polarization_vs_bilinear = 0.0;  // algebraic identity, any pair
    double polarization_vs_inner = 0.0;     // recombined vs <f,g>
    double dual_tol = kDualTol;
    int samples = 0;
    std::uint64_t seed = 0;
};

inline ReconstructionAudit reconstruction_equivalence_audit(
    const GFrameFamily& lambda, const GFrameFamily& gamma, const Controller& p,
    const Controller& q, int samples, std::uint64_t seed,
    const DualityOptions& opts = {}) {
    require_bessel_pair(lambda, gamma, p, q, "reconstruction_equivalence_audit");

    DualityOptions cert_opts = opts;
    cert_opts.samples = samples;
    cert_opts.seed = seed;
    const DualCertificate cert = check_duality(lambda, gamma, p, q, cert_opts);

    ReconstructionAudit audit;
    audit.residuals = cert.condition_checks;
    audit.dual_tol = opts.dual_tol;
    audit.samples = samples;
    audit.seed = seed;
    bool all_pass = true, all_fail = true;
    for (double r : audit.residuals) {
        all_pass = all_pass && r <= opts.dual_tol;
        all_fail = all_fail && r > opts.dual_tol;
    }
    audit.unanimous = all_pass || all_fail;
    audit.all_pass = all_pass;

    const auto energy = [&](const Vec& h) {
        return controlled_bilinear_form(lambda, gamma, p, q, h, h);
    };
    Rng rng(seed + 1);
    const Complex i_unit(0.0, 1.0);
    for (int k = 0; k < samples; ++k) {
        const Vec f = rng.unit_vector(lambda.ambient_dim);
        const Vec g = rng.unit_vector(lambda.ambient_dim);
        const Complex recombined = 0.25 * (energy(f + g) - energy(f - g) +
                                           i_unit * energy(f + i_unit * g) -
                                           i_unit * energy(f - i_unit * g));
        const Complex bilinear = controlled_bilinear_form(lambda, gamma, p, q, f, g);
        audit.polarization_vs_bilinear =
            std::max(audit.polarization_vs_bilinear, std::abs(recombined - bilinear));
        audit.polarization_vs_inner =
            std::max(audit.polarization_vs_inner, std::abs(recombined - g.dot(f)));
    }
    return audit;
}

/// Bounded-below inference: if S_{PLambdaGammaQ} is bounded below by lambda,
/// the (Q,Q)-controlled lower bound of Gamma is at least lambda^2 / B_Lambda
/// (and symmetrically through the adjoint).
struct LowerBoundInference {
    double lambda = 0.0;           // sigma_min(S_{PLGQ})
    double upper_lambda = 0.0;     // B_Lambda, (P,P)-controlled upper bound
    double upper_gamma = 0.0;      // B_Gamma, (Q,Q)-controlled upper bound
    double actual_lower_gamma = 0.0;
    double actual_lower_lambda = 0.0;
    double inferred_lower_gamma = 0.0;
    double inferred_lower_lambda = 0.0;
    bool gamma_holds = false;
    bool lambda_holds = false;
    bool vacuous = false;          // lambda below the frame floor
};

inline LowerBoundInference lower_bound_inference(const GFrameFamily& lambda,
                                                 const GFrameFamily& gamma,
                                                 const Controller& p, const Controller& q,
                                                 double slack = 1e-10) {
    require_bessel_pair(lambda, gamma, p, q, "lower_bound_inference");
    const Mat s_fwd = dual_frame_operator(lambda, gamma, p, q);

    LowerBoundInference inf;
    inf.lambda = smallest_singular_value(s_fwd);
    const HermitianEig el = hermitian_eigendecomposition(self_controlled_operator(lambda, p));
    const HermitianEig eg = hermitian_eigendecomposition(self_controlled_operator(gamma, q));
    inf.upper_lambda = el.eigenvalues(el.eigenvalues.size() - 1);
    inf.upper_gamma = eg.eigenvalues(eg.eigenvalues.size() - 1);
    inf.actual_lower_lambda = el.eigenvalues(0);
    inf.actual_lower_gamma = eg.eigenvalues(0);
    inf.inferred_lower_gamma =
        inf.upper_lambda > 0.0 ? inf.lambda * inf.lambda / inf.upper_lambda : 0.0;
    inf.inferred_lower_lambda =
        inf.upper_gamma > 0.0 ? inf.lambda * inf.lambda / inf.upper_gamma : 0.0;
    inf.vacuous = inf.lambda <= kFrameFloor;
    inf.gamma_holds = inf.actual_lower_gamma >= inf.inferred_lower_gamma - slack;
    inf.lambda_holds = inf.actual_lower_lambda >= inf.inferred_lower_lambda - slack;
    return inf;
}

// ---- canonical duals and the kernel parametrization -------------------------

enum class CanonicalMode { Paper, General };

inline std::string to_string(CanonicalMode m) {
    return m == CanonicalMode::Paper ? "paper" : "general";
}

struct DualConstruction {
    GFrameFamily gamma;
    DualCertificate certificate;
};

/// Right factor of the canonical dual: Gamma_w = Lambda_w * factor.
/// Paper mode is Gamma_w = Lambda_w S_{PLambdaP}^{-1} P, which reconstructs
/// only when P commutes with S_Lambda. General mode is
/// Gamma_w = Lambda_w S_Lambda^{-1} P^{-1}, which reconstructs always.
inline Mat canonical_dual_factor(const GFrameFamily& fam, const Controller& p,
                                 CanonicalMode mode) {
    require_controller_dim(fam, p, "canonical_dual");
    const Mat s = frame_operator(fam);
    if (mode == CanonicalMode::Paper) {
        const Mat s_pp = p.matrix() * s * p.matrix();
        const HermitianEig eig = hermitian_eigendecomposition(hermitian_part(s_pp));
        if (eig.eigenvalues(0) <= kFrameFloor)
            throw SingularFrameOperator("canonical_dual: S_{PLambdaP} is singular");
        return psd_function(s_pp, PsdFn::Inv) * p.matrix();
    }
    const HermitianEig eig = hermitian_eigendecomposition(s);
    if (eig.eigenvalues(0) <= kFrameFloor)
        throw SingularFrameOperator("canonical_dual: frame operator is singular");
    return psd_function(s, PsdFn::Inv) * p.inverse();
}

/// Canonical P-controlled dual (the T = 0 point of the parametrization), with
/// its duality certificate w.r.t. (P, I) attached.
inline DualConstruction canonical_dual(const GFrameFamily& fam, const Controller& p,
                                       CanonicalMode mode, const DualityOptions& opts = {}) {
    GFrameFamily gamma = right_multiply(fam, canonical_dual_factor(fam, p, mode));
    DualCertificate cert =
        check_duality(fam, gamma, p, Controller::identity(fam.ambient_dim), opts);
    return DualConstruction{std::move(gamma), cert};
}

/// Bounded map T : H -> l2({H_w}_w), stored as its stacked matrix in the
/// sqrt(mu)-weighted coordinates (so operator norms are the true ones).
struct KernelOperator {
    Mat weighted;  // (sum_w d_w) x n
    MeasureSpace space;
    Eigen::Index ambient_dim;

    KernelOperator(Mat m, MeasureSpace s, Eigen::Index n)
        : weighted(std::move(m)), space(std::move(s)), ambient_dim(n) {
        if (weighted.rows() != space.total_dim() || weighted.cols() != ambient_dim)
            throw DimensionMismatch("KernelOperator: stacked matrix has wrong shape");
        require_finite(weighted, "KernelOperator");
    }

    /// Raw per-node block: (Tf)_w = block(w) * f.
    Mat block(std::size_t w) const {
        return weighted.middleRows(space.offset(w), space.dim(w)) /
               std::sqrt(space.weight(w));
    }

    CoefficientFamily apply(const Vec& f) const {
        return unflatten(space, weighted * f);
    }

    double norm() const { return operator_norm(weighted); }
};

/// Stacked matrix of the synthesis operator T_{PLambdaP} ((PP)^{1/2} = P
/// exactly, no commutation gate needed).
inline Mat pp_synthesis_matrix(const GFrameFamily& fam, const Controller& p) {
    return p.matrix() * stacked_analysis_matrix(fam).adjoint();
}

/// Stacked matrix of the analysis operator T*_{PLambdaP} : f -> {Lambda_w P f}_w.
inline Mat pp_analysis_matrix(const GFrameFamily& fam, const Controller& p) {
    return stacked_analysis_matrix(fam) * p.matrix();
}

/// Residual of the kernel constraint T_{PLambdaP} T = 0.
inline double kernel_constraint_residual(const GFrameFamily& fam, const Controller& p,
                                         const KernelOperator& t) {
    if (!(t.space == fam.space) || t.ambient_dim != fam.ambient_dim)
        throw SpaceMismatch("kernel_constraint_residual: kernel operator on wrong space");
    return operator_norm(pp_synthesis_matrix(fam, p) * t.weighted);
}

/// Draws a random bounded map and projects it onto ker(T_{PLambdaP}):
/// T = K - M+ (M K) with M the stacked synthesis matrix. When M has full
/// column kernel rank zero (sum d_w = n, invertible), the projection forces
/// T = 0.
inline KernelOperator kernel_sampler(const GFrameFamily& fam, const Controller& p,
                                     std::uint64_t seed) {
    require_controller_dim(fam, p, "kernel_sampler");
    const Mat m = pp_synthesis_matrix(fam, p);
    const Mat m_pinv = pseudo_inverse(m);
    Rng rng(seed);
    const Mat k = rng.gaussian_matrix(fam.space.total_dim(), fam.ambient_dim);
    Mat t = k - m_pinv * (m * k);
    return KernelOperator(std::move(t), fam.space, fam.ambient_dim);
}

/// Project an arbitrary stacked map onto the kernel (idempotent on sampler
/// output).
inline KernelOperator project_to_kernel(const GFrameFamily& fam, const Controller& p,
                                        const KernelOperator& t) {
    const Mat m = pp_synthesis_matrix(fam, p);
    const Mat m_pinv = pseudo_inverse(m);
    Mat projected = t.weighted - m_pinv * (m * t.weighted);
    return KernelOperator(std::move(projected), fam.space, fam.ambient_dim);
}

/// All duals of a (P,P)-controlled frame: Gamma_w f = (Tf)_w + canonical part.
/// With the general canonical part the result is a certified P-controlled
/// dual for every admissible T; with the paper canonical part the certificate
/// records the commutation-dependent residual either way.
inline DualConstruction dual_parametrization(const GFrameFamily& fam, const Controller& p,
                                             const KernelOperator& t, CanonicalMode mode,
                                             const DualityOptions& opts = {},
                                             double kernel_tol = kKernelTol) {
    const double kres = kernel_constraint_residual(fam, p, t);
    if (kres > kernel_tol)
        throw KernelViolation("dual_parametrization: ||T_{PLambdaP} T|| = " +
                              std::to_string(kres) + " exceeds kernel tolerance");
    const Mat factor = canonical_dual_factor(fam, p, mode);
    std::vector<Mat> blocks;
    blocks.reserve(fam.space.size());
    for (std::size_t w = 0; w < fam.space.size(); ++w)
        blocks.push_back(t.block(w) + fam.blocks[w] * factor);
    GFrameFamily gamma(fam.space, fam.ambient_dim, std::move(blocks));
    DualCertificate cert =
        check_duality(fam, gamma, p, Controller::identity(fam.ambient_dim), opts);
    return DualConstruction{std::move(gamma), cert};
}

/// Completeness direction of the parametrization: recover T from a dual as
/// (Tf)_w = Gamma_w f - (canonical part) f.
inline KernelOperator extract_kernel(const GFrameFamily& fam, const Controller& p,
                                     const GFrameFamily& gamma, CanonicalMode mode) {
    if (!(gamma.space == fam.space) || gamma.ambient_dim != fam.ambient_dim)
        throw SpaceMismatch("extract_kernel: families live on different spaces");
    const Mat factor = canonical_dual_factor(fam, p, mode);
    Mat stacked(fam.space.total_dim(), fam.ambient_dim);
    for (std::size_t w = 0; w < fam.space.size(); ++w)
        stacked.middleRows(fam.space.offset(w), fam.space.dim(w)) =
            std::sqrt(fam.space.weight(w)) * (gamma.blocks[w] - fam.blocks[w] * factor);
    return KernelOperator(std::move(stacked), fam.space, fam.ambient_dim);
}

// ---- left-inverse characterization ------------------------------------------

/// U = T_{QGammaQ} built from a certified dual, with the residuals of the
/// left-inverse property and the per-basis identity Q Gamma_w* e_{w,v} =
/// U(e_{w,v} delta_w).
struct LeftInverseResult {
    Mat u;  // n x (sum d_w), sqrt(mu)-weighted coordinates
    double left_inverse_residual = 0.0;
    double basis_identity_residual = 0.0;
};

inline LeftInverseResult dual_to_left_inverse(const GFrameFamily& lambda,
                                              const GFrameFamily& gamma,
                                              const Controller& p, const Controller& q,
                                              const OrthonormalBases& bases,
                                              const DualityOptions& opts = {}) {
    require_orthonormal(lambda, bases);
    const DualCertificate cert = check_duality(lambda, gamma, p, q, opts);
    if (!cert.is_dual)
        throw NotDual("dual_to_left_inverse: Gamma is not a certified (P,Q)-dual (residual " +
                      std::to_string(cert.residual) + ")");

    LeftInverseResult result;
    result.u = q.matrix() * stacked_analysis_matrix(gamma).adjoint();
    const Mat t_star = pp_analysis_matrix(lambda, p);
    result.left_inverse_residual = operator_norm(
        result.u * t_star - Mat::Identity(lambda.ambient_dim, lambda.ambient_dim));
    if (result.left_inverse_residual > opts.dual_tol)
        throw NotLeftInverse("dual_to_left_inverse: U T*_{PLambdaP} != I (residual " +
                             std::to_string(result.left_inverse_residual) + ")");

    for (std::size_t w = 0; w < lambda.space.size(); ++w) {
        for (Eigen::Index v = 0; v < lambda.space.dim(w); ++v) {
            const Vec e = bases[w].col(v);
            const Vec lhs = q.matrix() * (gamma.blocks[w].adjoint() * e);
            const Vec rhs = result.u * flatten(delta_embedding(lambda.space, w, e));
            result.basis_identity_residual =
                std::max(result.basis_identity_residual, (lhs - rhs).norm());
        }
    }
    return result;
}

/// Reads a dual off a bounded left-inverse U of T*_{PLambdaP}:
/// Gamma_w* e_{w,v} = Q^{-1} U(e_{w,v} delta_w), assembled column by column.
inline DualConstruction left_inverse_to_dual(const GFrameFamily& lambda, const Controller& p,
                                             const Controller& q, const Mat& u,
                                             const DualityOptions& opts = {}) {
    if (u.rows() != lambda.ambient_dim || u.cols() != lambda.space.total_dim())
        throw DimensionMismatch("left_inverse_to_dual: U has wrong shape");
    const Mat t_star = pp_analysis_matrix(lambda, p);
    const double res =
        operator_norm(u * t_star - Mat::Identity(lambda.ambient_dim, lambda.ambient_dim));
    if (res > opts.dual_tol)
        throw NotLeftInverse("left_inverse_to_dual: U is not a left-inverse of T*_{PLambdaP}"
                             " (residual " + std::to_string(res) + ")");

    std::vector<Mat> blocks;
    blocks.reserve(lambda.space.size());
    for (std::size_t w = 0; w < lambda.space.size(); ++w) {
        // U(e_v delta_w) for all v at once = Q^-1 U[:, rows_w] / sqrt(mu_w).
        const Mat cols = u.middleCols(lambda.space.offset(w), lambda.space.dim(w));
        const Mat gamma_adj = q.inverse() * cols / std::sqrt(lambda.space.weight(w));
        blocks.push_back(gamma_adj.adjoint());
    }
    GFrameFamily gamma(lambda.space, lambda.ambient_dim, std::move(blocks));
    DualCertificate cert = check_duality(lambda, gamma, p, q, opts);
    return DualConstruction{std::move(gamma), cert};
}

/// The Moore-Penrose left-inverse of T*_{PLambdaP} (a left-inverse whenever
/// Lambda is a (P,P)-controlled frame).
inline Mat pinv_left_inverse(const GFrameFamily& fam, const Controller& p) {
    return pseudo_inverse(pp_analysis_matrix(fam, p));
}

/// The optimal (P,Q)-controlled Bessel bound against the squared norm of the
/// controlled synthesis operator (equal whenever (PQ)^{1/2} is defined).
struct BesselSynthesisCheck {
    double bessel_bound = 0.0;
    double synthesis_norm_sq = 0.0;
    double rel_diff = 0.0;
};

inline BesselSynthesisCheck bessel_bound_vs_synthesis_norm(const GFrameFamily& fam,
                                                           const Controller& p,
                                                           const Controller& q,
                                                           double commute_tol = kCommuteTol) {
    BesselSynthesisCheck check;
    check.bessel_bound = controlled_bounds(fam, p, q).controlled_upper;
    const double norm = operator_norm(controlled_synthesis_matrix(fam, p, q, commute_tol));
    check.synthesis_norm_sq = norm * norm;
    check.rel_diff = relative_diff(check.bessel_bound, check.synthesis_norm_sq);
    return check;
}

}  // namespace gframelab
