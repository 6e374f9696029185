#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gframelab/gframe.hpp"
#include "gframelab/rng.hpp"

// The (P,Q)-controlled layer: controllers in GL+(H), controlled operators and
// bounds, bound conversion between plain and controlled frames, and the
// equivalence-chain audits for Section 2. Identities that hold only under
// commutativity are measured, never assumed: every report carries the
// Hermitian defect of Q S P together with the relevant commutator norms.

namespace gframelab {

inline constexpr double kCommuteTol = 1e-8;   // gate for forming (PQ)^{1/2}
inline constexpr double kDefectTol = 1e-10;   // relative Hermitian-defect gate

/// Positive-definite invertible operator (element of GL+(H)) with cached
/// square root, inverse and spectral bounds.
class Controller {
public:
    explicit Controller(Mat m) : matrix_(std::move(m)) {
        if (matrix_.rows() != matrix_.cols())
            throw NotSquare("Controller: matrix must be square");
        require_finite(matrix_, "Controller");
        const HermitianEig eig = hermitian_eigendecomposition(matrix_);  // NotHermitian
        alpha_ = eig.eigenvalues(0);
        beta_ = eig.eigenvalues(eig.eigenvalues.size() - 1);
        if (alpha_ < kPsdFloor)
            throw NotPositive("Controller: smallest eigenvalue " + std::to_string(alpha_) +
                              " below positivity floor");
        RealVec root = eig.eigenvalues.cwiseSqrt();
        RealVec inv = eig.eigenvalues.cwiseInverse();
        sqrt_ = hermitian_part(eig.eigenvectors * root.asDiagonal() * eig.eigenvectors.adjoint());
        inv_ = hermitian_part(eig.eigenvectors * inv.asDiagonal() * eig.eigenvectors.adjoint());
    }

    static Controller identity(Eigen::Index n) { return Controller(Mat::Identity(n, n)); }

    const Mat& matrix() const { return matrix_; }
    const Mat& sqrt() const { return sqrt_; }
    const Mat& inverse() const { return inv_; }
    Eigen::Index dim() const { return matrix_.rows(); }
    /// Spectral bounds (alpha, beta): alpha I <= P <= beta I.
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double norm() const { return beta_; }

private:
    Mat matrix_, sqrt_, inv_;
    double alpha_ = 0.0, beta_ = 0.0;
};

enum class ControlledVerdict { ControlledFrame, ControlledBessel, Fail };

inline std::string to_string(ControlledVerdict v) {
    switch (v) {
        case ControlledVerdict::ControlledFrame: return "controlled_frame";
        case ControlledVerdict::ControlledBessel: return "controlled_bessel";
        case ControlledVerdict::Fail: return "fail";
    }
    return "?";
}

/// Controlled bounds report. Bounds come from the Hermitian part of Q S P;
/// the defect and the commutators say how far that reading stretched.
struct ControlledReport {
    double controlled_lower = 0.0;
    double controlled_upper = 0.0;
    double hermitian_defect = 0.0;
    std::map<std::string, double> commutation;
    ControlledVerdict verdict = ControlledVerdict::Fail;
    std::string notes;
};

inline void require_controller_dim(const GFrameFamily& fam, const Controller& c,
                                   const char* who) {
    if (c.dim() != fam.ambient_dim)
        throw DimensionMismatch(std::string(who) + ": controller dimension != ambient dim");
}

/// S_{PLambdaQ} = Q S_Lambda P, computed literally as that product so the
/// factorization identity holds in the same arithmetic.
inline Mat controlled_frame_operator(const GFrameFamily& fam, const Controller& p,
                                     const Controller& q) {
    require_controller_dim(fam, p, "controlled_frame_operator");
    require_controller_dim(fam, q, "controlled_frame_operator");
    return q.matrix() * frame_operator(fam) * p.matrix();
}

/// sum_w mu_w <Lambda_w P f, Lambda_w Q f>, evaluated block by block.
inline Complex controlled_quadratic_form(const GFrameFamily& fam, const Controller& p,
                                         const Controller& q, const Vec& f) {
    require_controller_dim(fam, p, "controlled_quadratic_form");
    require_controller_dim(fam, q, "controlled_quadratic_form");
    if (f.size() != fam.ambient_dim)
        throw DimensionMismatch("controlled_quadratic_form: vector length != ambient dim");
    const Vec pf = p.matrix() * f;
    const Vec qf = q.matrix() * f;
    Complex acc(0.0, 0.0);
    for (std::size_t w = 0; w < fam.space.size(); ++w) {
        const Vec left = fam.blocks[w] * pf;
        const Vec right = fam.blocks[w] * qf;
        acc += fam.space.weight(w) * right.dot(left);  // <left, right>
    }
    return acc;
}

/// Bounds-and-verdict logic shared by every controlled-operator reading:
/// extremal eigenvalues of the Hermitian part, defect judged against
/// defect_tol * defect_scale.
inline ControlledReport report_from_operator(const Mat& op, double defect_scale,
                                             double frame_floor, double defect_tol) {
    ControlledReport report;
    report.hermitian_defect = hermitian_defect(op);
    if (!op.allFinite()) {
        report.verdict = ControlledVerdict::Fail;
        report.notes = "operator has non-finite entries";
        return report;
    }
    const HermitianEig eig = hermitian_eigendecomposition(hermitian_part(op));
    report.controlled_lower = eig.eigenvalues(0);
    report.controlled_upper = eig.eigenvalues(eig.eigenvalues.size() - 1);
    const bool defect_ok = report.hermitian_defect <= defect_tol * std::max(defect_scale, 1e-300);
    if (!defect_ok) {
        report.verdict = ControlledVerdict::Fail;
        report.notes = "controlled form is not real: Hermitian defect exceeds tolerance";
    } else if (report.controlled_lower > frame_floor) {
        report.verdict = ControlledVerdict::ControlledFrame;
    } else {
        report.verdict = ControlledVerdict::ControlledBessel;
    }
    return report;
}

/// Controlled bounds per the controlled frame inequality. A and B are the
/// extremal eigenvalues of (Q S_Lambda P + (Q S_Lambda P)*)/2; the verdict
/// additionally requires the Bessel precondition on the underlying family and
/// a Hermitian defect within defect_tol * ||S||*||P||*||Q||.
inline ControlledReport controlled_bounds(const GFrameFamily& fam, const Controller& p,
                                          const Controller& q,
                                          double frame_floor = kFrameFloor,
                                          double defect_tol = kDefectTol) {
    const Mat s = frame_operator(fam);
    const Mat op = q.matrix() * s * p.matrix();
    const double scale = operator_norm(s) * p.norm() * q.norm();
    ControlledReport report = report_from_operator(op, scale, frame_floor, defect_tol);
    report.commutation["PQ_minus_QP"] = commutator_norm(p.matrix(), q.matrix());
    report.commutation["PS_minus_SP"] = commutator_norm(p.matrix(), s);
    report.commutation["QS_minus_SQ"] = commutator_norm(q.matrix(), s);
    const FrameReport plain = frame_bounds(fam, frame_floor);
    if (plain.verdict == FrameVerdict::NotBesselDegenerate) {
        report.verdict = ControlledVerdict::Fail;
        report.notes = "underlying family is not a g-Bessel family";
    }
    return report;
}

/// (PQ)^{1/2} through the Hermitian part, gated on P and Q actually
/// commuting: ||PQ - QP|| <= commute_tol * ||P|| * ||Q||. The Hermitian parts
/// of PQ and QP coincide, so the same root serves both orderings.
inline Mat commuting_product_root(const Controller& p, const Controller& q,
                                  double commute_tol = kCommuteTol) {
    const double comm = commutator_norm(p.matrix(), q.matrix());
    if (comm > commute_tol * p.norm() * q.norm())
        throw NonCommutingControllers(
            "controllers do not commute (||PQ-QP|| = " + std::to_string(comm) +
            "); (PQ)^{1/2} is not well-defined");
    return psd_function(hermitian_part(p.matrix() * q.matrix()), PsdFn::Sqrt);
}

/// Controlled synthesis: {c_w}_w -> (PQ)^{1/2} sum_w mu_w Lambda_w* c_w.
inline Vec controlled_synthesis(const GFrameFamily& fam, const Controller& p,
                                const Controller& q, const CoefficientFamily& c,
                                double commute_tol = kCommuteTol) {
    require_controller_dim(fam, p, "controlled_synthesis");
    require_controller_dim(fam, q, "controlled_synthesis");
    const Mat root = commuting_product_root(p, q, commute_tol);
    return root * synthesis(fam, c);
}

/// Controlled analysis: f -> {Lambda_w (QP)^{1/2} f}_w. Mutually adjoint with
/// controlled_synthesis under the weighted inner product.
inline CoefficientFamily controlled_analysis(const GFrameFamily& fam, const Controller& p,
                                             const Controller& q, const Vec& f,
                                             double commute_tol = kCommuteTol) {
    require_controller_dim(fam, p, "controlled_analysis");
    require_controller_dim(fam, q, "controlled_analysis");
    const Mat root = commuting_product_root(q, p, commute_tol);
    return analysis(fam, root * f);
}

/// Stacked matrix of the controlled synthesis operator T_{PLambdaQ} in the
/// sqrt(mu)-weighted coordinates: (PQ)^{1/2} A*, with A the stacked analysis
/// matrix. Its operator norm is the true norm on l2({H_w}).
inline Mat controlled_synthesis_matrix(const GFrameFamily& fam, const Controller& p,
                                       const Controller& q,
                                       double commute_tol = kCommuteTol) {
    const Mat root = commuting_product_root(p, q, commute_tol);
    return root * stacked_analysis_matrix(fam).adjoint();
}

enum class ConversionDirection { ControlledToPlain, PlainToControlled };

/// Bound conversion along the equivalence between plain and controlled
/// frames: controlled (A,B) -> (A/||(PQ)^{1/2}||^2, B*||(PQ)^{-1/2}||^2), and
/// plain (A,B) -> (alpha1*alpha2*A, beta1*beta2*B) from the controllers'
/// spectral bounds. The root norms are read off the Hermitian part of PQ.
inline std::pair<double, double> bound_conversion(double lower, double upper,
                                                  const Controller& p, const Controller& q,
                                                  ConversionDirection direction) {
    if (direction == ConversionDirection::PlainToControlled)
        return {p.alpha() * q.alpha() * lower, p.beta() * q.beta() * upper};
    const Mat pq_herm = hermitian_part(p.matrix() * q.matrix());
    const HermitianEig eig = hermitian_eigendecomposition(pq_herm);
    const double lam_min = eig.eigenvalues(0);
    const double lam_max = eig.eigenvalues(eig.eigenvalues.size() - 1);
    if (lam_min <= kPsdFloor)
        throw NotPositive("bound_conversion: Hermitian part of PQ is not positive definite");
    // ||(PQ)^{1/2}||^2 = lam_max, ||(PQ)^{-1/2}||^2 = 1/lam_min.
    return {lower / lam_max, upper / lam_min};
}

/// One sampled identity-chain audit.
///
/// For each random unit f the four readings of the controlled energy are
/// evaluated:
///   controlled   <Q S P f, f>              (the (P,Q)-controlled form)
///   sqrt_pair    <R S R f, f>, R=(PQ)^{1/2}  (the (R,R)-controlled form)
///   single_pq    <S PQ f, f>               (PQ-controlled, single controller)
///   single_qp    <S QP f, f>               (QP-controlled, single controller)
/// Discrepancies are data, not failures; commutator norms name the culprits.
struct EquivalenceAudit {
    std::map<std::string, double> discrepancies;  // max relative, per pair
    std::map<std::string, double> commutators;
    std::map<std::string, bool> item_frame;  // per-statement frame verdicts
    bool verdicts_agree = false;
    // Smallest eigenvalue of (PQ + QP)/2; negative means the sqrt-pair
    // reading rests on a clamped root.
    double herm_pq_min_eigenvalue = 0.0;
    int samples = 0;
    std::uint64_t seed = 0;
};

inline EquivalenceAudit equivalence_audit(const GFrameFamily& fam, const Controller& p,
                                          const Controller& q, int samples,
                                          std::uint64_t seed,
                                          double frame_floor = kFrameFloor,
                                          double defect_tol = kDefectTol) {
    require_controller_dim(fam, p, "equivalence_audit");
    require_controller_dim(fam, q, "equivalence_audit");
    EquivalenceAudit audit;
    audit.samples = samples;
    audit.seed = seed;

    const Mat s = frame_operator(fam);
    const Mat op_controlled = q.matrix() * s * p.matrix();
    const Mat root = psd_sqrt_clamped(hermitian_part(p.matrix() * q.matrix()),
                                      &audit.herm_pq_min_eigenvalue);
    const Mat op_sqrt = root * s * root;
    const Mat op_pq = s * (p.matrix() * q.matrix());
    const Mat op_qp = s * (q.matrix() * p.matrix());

    audit.commutators["PQ_minus_QP"] = commutator_norm(p.matrix(), q.matrix());
    audit.commutators["PS_minus_SP"] = commutator_norm(p.matrix(), s);
    audit.commutators["QS_minus_SQ"] = commutator_norm(q.matrix(), s);

    Rng rng(seed);
    double d_sqrt = 0.0, d_pq = 0.0, d_qp = 0.0;
    for (int i = 0; i < samples; ++i) {
        const Vec f = rng.unit_vector(fam.ambient_dim);
        const Complex q1 = f.dot(op_controlled * f);
        const Complex q2 = f.dot(op_sqrt * f);
        const Complex q3 = f.dot(op_pq * f);
        const Complex q4 = f.dot(op_qp * f);
        d_sqrt = std::max(d_sqrt, relative_diff(q1, q2));
        d_pq = std::max(d_pq, relative_diff(q1, q3));
        d_qp = std::max(d_qp, relative_diff(q1, q4));
    }
    audit.discrepancies["controlled_vs_sqrt_pair"] = d_sqrt;
    audit.discrepancies["controlled_vs_single_pq"] = d_pq;
    audit.discrepancies["controlled_vs_single_qp"] = d_qp;

    const double scale = operator_norm(s) * p.norm() * q.norm();
    const auto frame_of = [&](const Mat& op) {
        return report_from_operator(op, scale, frame_floor, defect_tol).verdict ==
               ControlledVerdict::ControlledFrame;
    };
    audit.item_frame["item1_pq_controlled"] = frame_of(op_controlled);
    audit.item_frame["item2_sqrt_pair"] = frame_of(op_sqrt);
    audit.item_frame["item3_single_pq"] = frame_of(op_pq);
    audit.item_frame["item3_single_qp"] = frame_of(op_qp);
    audit.item_frame["item6_plain"] =
        frame_bounds(fam, frame_floor).verdict == FrameVerdict::Frame;

    const bool plain_is_frame = audit.item_frame.at("item6_plain");
    audit.verdicts_agree = true;
    for (const auto& [name, is_frame] : audit.item_frame)
        audit.verdicts_agree = audit.verdicts_agree && (is_frame == plain_is_frame);
    return audit;
}

/// Induced-sequence audit. Rebuilds the controlled energy from the induced
/// vectors u_{w,v} = Lambda_w* e_{w,v} two ways:
///   (a) sum over (w,v) of mu_w <f, P u><Q u, f>      -- the (P,Q) form
///   (b) the same sum rewritten over {P u} with the single controller Q P^-1
/// and compares both against controlled_quadratic_form on random vectors.
struct InducedCheck {
    double max_rel_pq = 0.0;        // (a) vs direct form
    double max_rel_rewritten = 0.0; // (b) vs direct form
    ControlledReport induced_report;
    ControlledReport rewritten_report;
    int samples = 0;
    std::uint64_t seed = 0;
};

inline InducedCheck induced_controlled_check(const GFrameFamily& fam, const Controller& p,
                                             const Controller& q,
                                             const OrthonormalBases& bases, int samples,
                                             std::uint64_t seed,
                                             double frame_floor = kFrameFloor,
                                             double defect_tol = kDefectTol) {
    require_controller_dim(fam, p, "induced_controlled_check");
    require_controller_dim(fam, q, "induced_controlled_check");
    const GFrameFamily induced = induced_sequence(fam, bases);

    // Induced vectors with their weights, flat w-major order.
    std::vector<Vec> u;
    std::vector<double> mu;
    u.reserve(fam.space.total_dim());
    for (std::size_t w = 0; w < fam.space.size(); ++w)
        for (Eigen::Index v = 0; v < fam.space.dim(w); ++v) {
            u.push_back(induced_vector(fam, bases, w, v));
            mu.push_back(fam.space.weight(w));
        }

    const Mat c = q.matrix() * p.inverse();  // Q P^-1
    InducedCheck check;
    check.samples = samples;
    check.seed = seed;
    Rng rng(seed);
    for (int i = 0; i < samples; ++i) {
        const Vec f = rng.unit_vector(fam.ambient_dim);
        const Complex direct = controlled_quadratic_form(fam, p, q, f);
        Complex sum_pq(0.0, 0.0), sum_rw(0.0, 0.0);
        for (std::size_t k = 0; k < u.size(); ++k) {
            const Vec pu = p.matrix() * u[k];
            const Vec qu = q.matrix() * u[k];
            const Vec cpu = c * pu;
            sum_pq += mu[k] * pu.dot(f) * f.dot(qu);   // <f, Pu><Qu, f>
            sum_rw += mu[k] * pu.dot(f) * f.dot(cpu);  // <f, Pu><QP^-1 Pu, f>
        }
        check.max_rel_pq = std::max(check.max_rel_pq, relative_diff(direct, sum_pq));
        check.max_rel_rewritten = std::max(check.max_rel_rewritten, relative_diff(direct, sum_rw));
    }

    check.induced_report = controlled_bounds(induced, p, q, frame_floor, defect_tol);
    // Operator behind reading (b): (Q P^-1) * M with M = sum mu (Pu)(Pu)*.
    Mat m_pu = Mat::Zero(fam.ambient_dim, fam.ambient_dim);
    for (std::size_t k = 0; k < u.size(); ++k) {
        const Vec pu = p.matrix() * u[k];
        m_pu += mu[k] * (pu * pu.adjoint());
    }
    const double scale = operator_norm(frame_operator(fam)) * p.norm() * q.norm();
    check.rewritten_report = report_from_operator(c * m_pu, scale, frame_floor, defect_tol);
    return check;
}

}  // namespace gframelab
