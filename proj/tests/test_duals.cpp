#include <gtest/gtest.h>

#include <cmath>

#include "gframelab/duals.hpp"
#include "gframelab/scenarios.hpp"

using namespace gframelab;

namespace {

Mat diag2(double a, double b) {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

GFrameFamily identity_single_node() {
    const MeasureSpace s({1.0}, {2});
    return GFrameFamily(s, 2, {Mat::Identity(2, 2)});
}

// Redundant random frame: n = 3, sum d_w = 6.
GFrameFamily redundant_family(std::uint64_t seed) {
    return random_gframe(3, {2, 2, 2}, {1.0, 0.5, 1.5}, seed);
}

// S_Lambda = diag(4, 1) with a rotated-diagonal P: [P, S_Lambda] != 0.
struct NonCommutingFixture {
    GFrameFamily family;
    Controller p;
};

NonCommutingFixture noncommuting_fixture() {
    const MeasureSpace s({1.0, 1.0}, {1, 1});
    Mat r0(1, 2), r1(1, 2);
    r0 << 2.0, 0.0;
    r1 << 0.0, 1.0;
    Mat p(2, 2);
    p << 2.0, 1.0, 1.0, 2.0;
    return NonCommutingFixture{GFrameFamily(s, 2, {r0, r1}), Controller(p)};
}

/// Exact (P,Q)-dual: Gamma_w = Lambda_w S^-1 P^-1 Q^-1.
GFrameFamily make_pq_dual(const GFrameFamily& fam, const Controller& p, const Controller& q) {
    const DualConstruction base = canonical_dual(fam, p, CanonicalMode::General);
    return right_multiply(base.gamma, q.inverse());
}

}  // namespace

TEST(DualFrameOperator, SameFamilyIdentityControllersGiveFrameOperator) {
    const GFrameFamily fam = redundant_family(1);
    const Controller id = Controller::identity(3);
    EXPECT_LE(operator_norm(dual_frame_operator(fam, fam, id, id) - frame_operator(fam)),
              1e-13);
}

TEST(DualFrameOperator, SingleNodeForcedArithmetic) {
    const GFrameFamily fam = identity_single_node();
    const Mat got = dual_frame_operator(fam, fam, Controller(diag2(2.0, 1.0)),
                                        Controller::identity(2));
    EXPECT_LE(operator_norm(got - diag2(2.0, 1.0)), 1e-14);
}

TEST(DualFrameOperator, AdjointIdentity) {
    const GFrameFamily lambda = redundant_family(2);
    const GFrameFamily gamma = redundant_family(3);
    const Controller p = random_controller(3, 10.0, 4);
    const Controller q = random_controller(3, 10.0, 5);
    const Mat fwd = dual_frame_operator(lambda, gamma, p, q);
    const Mat rev = dual_frame_operator(gamma, lambda, q, p);
    EXPECT_LE(operator_norm(fwd.adjoint() - rev), 1e-12);
}

TEST(DualFrameOperator, FactorizationAndSynthesisCompositionAgree) {
    const GFrameFamily lambda = redundant_family(6);
    const GFrameFamily gamma = redundant_family(7);
    const Controller p = random_controller(3, 10.0, 8);
    const Controller q = random_controller(3, 10.0, 9);
    const Mat direct = dual_frame_operator(lambda, gamma, p, q);

    // Literal per-node sum: sum_w mu_w P Lambda_w* Gamma_w Q.
    Mat literal = Mat::Zero(3, 3);
    for (std::size_t w = 0; w < lambda.space.size(); ++w)
        literal += lambda.space.weight(w) * (p.matrix() * lambda.blocks[w].adjoint() *
                                             gamma.blocks[w] * q.matrix());
    EXPECT_LE(operator_norm(direct - literal), 1e-12);

    // T_{PLambdaP} T*_{QGammaQ} through the stacked matrices.
    const Mat composed = pp_synthesis_matrix(lambda, p) * pp_analysis_matrix(gamma, q);
    EXPECT_LE(operator_norm(direct - composed), 1e-12);
}

TEST(CheckDuality, IdentityPairIsExactDual) {
    const GFrameFamily fam = identity_single_node();
    const Controller id = Controller::identity(2);
    const DualCertificate cert = check_duality(fam, fam, id, id);
    EXPECT_EQ(cert.residual, 0.0);
    EXPECT_TRUE(cert.is_dual);
    for (double c : cert.condition_checks) EXPECT_LE(c, 1e-14);
    EXPECT_NEAR(cert.lambda_min, 1.0, 1e-14);
}

TEST(CheckDuality, CanonicalDualCertifies) {
    const GFrameFamily fam = redundant_family(11);
    const Controller p = random_controller(3, 10.0, 12);
    const DualConstruction dual = canonical_dual(fam, p, CanonicalMode::General);
    EXPECT_LE(dual.certificate.residual, 1e-10);
    EXPECT_TRUE(dual.certificate.is_dual);
}

TEST(CheckDuality, ScalingDestroysDuality) {
    const GFrameFamily fam = redundant_family(13);
    const Controller p = random_controller(3, 10.0, 14);
    const Controller id = Controller::identity(3);
    const DualConstruction dual = canonical_dual(fam, p, CanonicalMode::General);
    const GFrameFamily doubled = scale_family(dual.gamma, Complex(2.0, 0.0));
    const DualCertificate cert = check_duality(fam, doubled, p, id);
    EXPECT_NEAR(cert.residual, 1.0, 1e-9);  // ||2I - I|| = 1
    EXPECT_FALSE(cert.is_dual);
}

TEST(CheckDuality, SymmetryHoldsAtOperatorLevel) {
    const GFrameFamily lambda = redundant_family(15);
    const GFrameFamily gamma = redundant_family(16);
    const Controller p = random_controller(3, 10.0, 17);
    const Controller q = random_controller(3, 10.0, 18);
    const Mat fwd = dual_frame_operator(lambda, gamma, p, q);
    const Mat rev = dual_frame_operator(gamma, lambda, q, p);
    EXPECT_LE(operator_norm(rev - fwd.adjoint()), 1e-12);
    const DualCertificate a = check_duality(lambda, gamma, p, q);
    const DualCertificate b = check_duality(gamma, lambda, q, p);
    EXPECT_EQ(a.is_dual, b.is_dual);
}

TEST(ReconstructionAudit, DualPairPassesAllFourConditions) {
    const GFrameFamily fam = redundant_family(21);
    const Controller p = random_controller(3, 10.0, 22);
    const Controller q = random_controller(3, 10.0, 23);
    const GFrameFamily gamma = make_pq_dual(fam, p, q);
    const ReconstructionAudit audit =
        reconstruction_equivalence_audit(fam, gamma, p, q, 32, 24);
    EXPECT_TRUE(audit.unanimous);
    EXPECT_TRUE(audit.all_pass);
    for (double r : audit.residuals) EXPECT_LE(r, 1e-10);
    EXPECT_LE(audit.polarization_vs_bilinear, 1e-12);
    EXPECT_LE(audit.polarization_vs_inner, 1e-10);
}

TEST(ReconstructionAudit, NonDualPairFailsAllFourTogether) {
    const GFrameFamily fam = redundant_family(25);
    const Controller p = random_controller(3, 10.0, 26);
    const Controller q = random_controller(3, 10.0, 27);
    const GFrameFamily doubled =
        scale_family(make_pq_dual(fam, p, q), Complex(2.0, 0.0));
    const ReconstructionAudit audit =
        reconstruction_equivalence_audit(fam, doubled, p, q, 32, 28);
    EXPECT_TRUE(audit.unanimous);
    EXPECT_FALSE(audit.all_pass);
    for (double r : audit.residuals) EXPECT_GE(r, 0.5);
    EXPECT_LE(audit.polarization_vs_bilinear, 1e-12);  // algebra holds regardless
}

TEST(LowerBoundInference, IdentityPairSaturates) {
    const GFrameFamily fam = identity_single_node();
    const Controller id = Controller::identity(2);
    const LowerBoundInference inf = lower_bound_inference(fam, fam, id, id);
    EXPECT_NEAR(inf.lambda, 1.0, 1e-13);
    EXPECT_NEAR(inf.inferred_lower_gamma, 1.0, 1e-12);
    EXPECT_TRUE(inf.gamma_holds);
    EXPECT_TRUE(inf.lambda_holds);
    EXPECT_FALSE(inf.vacuous);
}

TEST(LowerBoundInference, CanonicalDualPair) {
    const GFrameFamily fam = redundant_family(31);
    const Controller p = random_controller(3, 10.0, 32);
    const Controller q = random_controller(3, 10.0, 33);
    const GFrameFamily gamma = make_pq_dual(fam, p, q);
    const LowerBoundInference inf = lower_bound_inference(fam, gamma, p, q);
    EXPECT_NEAR(inf.lambda, 1.0, 1e-9);
    EXPECT_TRUE(inf.gamma_holds);
    EXPECT_TRUE(inf.lambda_holds);
    EXPECT_GE(inf.actual_lower_gamma, inf.lambda * inf.lambda / inf.upper_lambda - 1e-10);
}

TEST(LowerBoundInference, SingularOperatorIsVacuous) {
    const GFrameFamily lambda = identity_single_node();
    const MeasureSpace s({1.0}, {2});
    const GFrameFamily gamma(s, 2, {diag2(1.0, 0.0)});  // annihilates e2
    const Controller id = Controller::identity(2);
    const LowerBoundInference inf = lower_bound_inference(lambda, gamma, id, id);
    EXPECT_NEAR(inf.lambda, 0.0, 1e-14);
    EXPECT_TRUE(inf.vacuous);
    EXPECT_TRUE(inf.gamma_holds);  // inferred bound degenerates to zero
}

TEST(CanonicalDual, ModesCoincideAtIdentityController) {
    const GFrameFamily fam = redundant_family(41);
    const Controller id = Controller::identity(3);
    const DualConstruction paper = canonical_dual(fam, id, CanonicalMode::Paper);
    const DualConstruction general = canonical_dual(fam, id, CanonicalMode::General);
    for (std::size_t w = 0; w < fam.space.size(); ++w)
        EXPECT_LE(operator_norm(paper.gamma.blocks[w] - general.gamma.blocks[w]), 1e-11);
    EXPECT_TRUE(paper.certificate.is_dual);
    EXPECT_TRUE(general.certificate.is_dual);
}

TEST(CanonicalDual, CommutingControllerMakesBothModesPass) {
    const GFrameFamily fam = redundant_family(42);
    const Controller p = random_controller(3, 10.0, 43, frame_operator(fam));
    const DualConstruction paper = canonical_dual(fam, p, CanonicalMode::Paper);
    const DualConstruction general = canonical_dual(fam, p, CanonicalMode::General);
    EXPECT_LE(paper.certificate.residual, 1e-10);
    EXPECT_LE(general.certificate.residual, 1e-10);
    for (std::size_t w = 0; w < fam.space.size(); ++w)
        EXPECT_LE(operator_norm(paper.gamma.blocks[w] - general.gamma.blocks[w]), 1e-10);
}

TEST(CanonicalDual, PaperModeFailsExactlyByCommutatorResidual) {
    const auto fx = noncommuting_fixture();
    const DualConstruction general = canonical_dual(fx.family, fx.p, CanonicalMode::General);
    EXPECT_LE(general.certificate.residual, 1e-10);

    const DualConstruction paper = canonical_dual(fx.family, fx.p, CanonicalMode::Paper);
    const Mat s = frame_operator(fx.family);
    const Mat eye = Mat::Identity(2, 2);
    const double expected = operator_norm(
        fx.p.matrix() * s * fx.p.inverse() * psd_function(s, PsdFn::Inv) - eye);
    EXPECT_GT(paper.certificate.residual, 1e-3);
    EXPECT_NEAR(paper.certificate.residual, expected, 1e-10);
}

TEST(CanonicalDual, SingularFrameOperatorThrows) {
    const MeasureSpace s({1.0}, {1});
    Mat row(1, 2);
    row << 1.0, 0.0;  // rank-deficient: e2 is annihilated
    const GFrameFamily fam(s, 2, {row});
    EXPECT_THROW(canonical_dual(fam, Controller::identity(2), CanonicalMode::General),
                 SingularFrameOperator);
    EXPECT_THROW(canonical_dual(fam, Controller::identity(2), CanonicalMode::Paper),
                 SingularFrameOperator);
}

TEST(KernelSampler, SquareInvertibleStackForcesZero) {
    const GFrameFamily fam = identity_single_node();  // sum d_w = n = 2
    const KernelOperator t = kernel_sampler(fam, Controller::identity(2), 51);
    EXPECT_LE(t.norm(), 1e-12);
}

TEST(KernelSampler, RedundantInstanceGivesNonzeroKernelElement) {
    const GFrameFamily fam = redundant_family(52);
    const Controller p = random_controller(3, 10.0, 53);
    const KernelOperator t = kernel_sampler(fam, p, 54);
    EXPECT_GT(t.norm(), 0.1);
    EXPECT_LE(kernel_constraint_residual(fam, p, t), 1e-12);
}

TEST(KernelSampler, ProjectionIsIdempotent) {
    const GFrameFamily fam = redundant_family(55);
    const Controller p = random_controller(3, 10.0, 56);
    const KernelOperator t = kernel_sampler(fam, p, 57);
    const KernelOperator again = project_to_kernel(fam, p, t);
    EXPECT_LE(operator_norm(again.weighted - t.weighted), 1e-12 * std::max(1.0, t.norm()));
}

TEST(DualParametrization, ZeroKernelGivesCanonicalDual) {
    const GFrameFamily fam = redundant_family(61);
    const Controller p = random_controller(3, 10.0, 62);
    const KernelOperator zero(Mat::Zero(fam.space.total_dim(), 3), fam.space, 3);
    const DualConstruction parametrized =
        dual_parametrization(fam, p, zero, CanonicalMode::General);
    const DualConstruction canonical = canonical_dual(fam, p, CanonicalMode::General);
    for (std::size_t w = 0; w < fam.space.size(); ++w)
        EXPECT_LE(operator_norm(parametrized.gamma.blocks[w] - canonical.gamma.blocks[w]),
                  1e-14);
}

TEST(DualParametrization, SampledKernelsCertify) {
    const GFrameFamily fam = redundant_family(63);
    const Controller p = random_controller(3, 10.0, 64);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const KernelOperator t = kernel_sampler(fam, p, 100 + seed);
        const DualConstruction dual =
            dual_parametrization(fam, p, t, CanonicalMode::General);
        EXPECT_LE(dual.certificate.residual, 1e-10) << "seed " << seed;
        EXPECT_TRUE(dual.certificate.is_dual);
    }
}

TEST(DualParametrization, DistinctKernelsGiveDistinctDualsAdditively) {
    const GFrameFamily fam = redundant_family(65);
    const Controller p = random_controller(3, 10.0, 66);
    const KernelOperator t1 = kernel_sampler(fam, p, 67);
    const KernelOperator t2 = kernel_sampler(fam, p, 68);
    const GFrameFamily g1 = dual_parametrization(fam, p, t1, CanonicalMode::General).gamma;
    const GFrameFamily g2 = dual_parametrization(fam, p, t2, CanonicalMode::General).gamma;
    for (std::size_t w = 0; w < fam.space.size(); ++w) {
        const double lhs = operator_norm(g1.blocks[w] - g2.blocks[w]);
        const double rhs = operator_norm(t1.block(w) - t2.block(w));
        EXPECT_NEAR(lhs, rhs, 1e-12);
    }
}

TEST(DualParametrization, RejectsNonKernelOperator) {
    const GFrameFamily fam = redundant_family(71);
    const Controller p = random_controller(3, 10.0, 72);
    Rng rng(73);
    const KernelOperator bad(rng.gaussian_matrix(fam.space.total_dim(), 3), fam.space, 3);
    EXPECT_THROW(dual_parametrization(fam, p, bad, CanonicalMode::General), KernelViolation);
}

TEST(ExtractKernel, RoundTripsBlockExactly) {
    const GFrameFamily fam = redundant_family(81);
    const Controller p = random_controller(3, 10.0, 82);
    const KernelOperator t = kernel_sampler(fam, p, 83);
    const DualConstruction dual = dual_parametrization(fam, p, t, CanonicalMode::General);
    const KernelOperator back = extract_kernel(fam, p, dual.gamma, CanonicalMode::General);
    EXPECT_LE(operator_norm(back.weighted - t.weighted), 1e-12);
    EXPECT_LE(kernel_constraint_residual(fam, p, back), 1e-10);
}

TEST(ExtractKernel, ProofBoundsHold) {
    const GFrameFamily fam = redundant_family(84);
    const Controller p = random_controller(3, 10.0, 85);
    const KernelOperator t = kernel_sampler(fam, p, 86);
    const DualConstruction dual = dual_parametrization(fam, p, t, CanonicalMode::General);

    const FrameReport lambda_plain = frame_bounds(fam);
    const FrameReport gamma_plain = frame_bounds(dual.gamma);
    const double b1 = gamma_plain.upper_bound;
    const double a = lambda_plain.lower_bound;
    const double t_norm_sq = t.norm() * t.norm();
    EXPECT_LE(t_norm_sq, b1 + 1.0 / a + 2.0 * std::sqrt(b1 / a) + 1e-8);

    const Mat s_pp = self_controlled_operator(fam, p);
    const double factor_norm = operator_norm(psd_function(s_pp, PsdFn::Inv) * p.matrix());
    EXPECT_LE(b1, 2.0 * (lambda_plain.upper_bound * factor_norm * factor_norm + t_norm_sq) +
                      1e-8);
}

TEST(LeftInverse, IdentityInstanceRoundTrips) {
    const GFrameFamily fam = identity_single_node();
    const Controller id = Controller::identity(2);
    const LeftInverseResult li =
        dual_to_left_inverse(fam, fam, id, id, standard_bases(fam.space));
    EXPECT_LE(operator_norm(li.u - Mat::Identity(2, 2)), 1e-13);
    EXPECT_LE(li.left_inverse_residual, 1e-13);
    EXPECT_LE(li.basis_identity_residual, 1e-13);
    const DualConstruction back = left_inverse_to_dual(fam, id, id, li.u);
    EXPECT_LE(operator_norm(back.gamma.blocks[0] - Mat::Identity(2, 2)), 1e-13);
}

TEST(LeftInverse, CanonicalDualRoundTrip) {
    const GFrameFamily fam = redundant_family(91);
    const Controller p = random_controller(3, 10.0, 92);
    const Controller q = random_controller(3, 10.0, 93);
    const GFrameFamily gamma = make_pq_dual(fam, p, q);
    const LeftInverseResult li =
        dual_to_left_inverse(fam, gamma, p, q, standard_bases(fam.space));
    EXPECT_LE(li.left_inverse_residual, 1e-10);
    EXPECT_LE(li.basis_identity_residual, 1e-10);
    const DualConstruction back = left_inverse_to_dual(fam, p, q, li.u);
    EXPECT_TRUE(back.certificate.is_dual);
    for (std::size_t w = 0; w < fam.space.size(); ++w)
        EXPECT_LE(operator_norm(back.gamma.blocks[w] - gamma.blocks[w]), 1e-10);
}

TEST(LeftInverse, BasisIdentityHoldsForRotatedBases) {
    // Q Gamma_w* e = U(e delta_w) is quantified over whichever orthonormal
    // bases are in play, not just the standard ones.
    const GFrameFamily fam = redundant_family(191);
    const Controller p = random_controller(3, 10.0, 192);
    const Controller q = random_controller(3, 10.0, 193);
    const GFrameFamily gamma = make_pq_dual(fam, p, q);
    OrthonormalBases bases;
    Rng rng(194);
    for (std::size_t w = 0; w < fam.space.size(); ++w)
        bases.push_back(random_unitary(fam.space.dim(w), rng));
    const LeftInverseResult li = dual_to_left_inverse(fam, gamma, p, q, bases);
    EXPECT_LE(li.basis_identity_residual, 1e-10);
}

TEST(LeftInverse, PseudoInverseYieldsCertifiedDual) {
    const GFrameFamily fam = redundant_family(94);
    const Controller p = random_controller(3, 10.0, 95);
    const Controller q = random_controller(3, 10.0, 96);
    const Mat u = pinv_left_inverse(fam, p);
    const DualConstruction dual = left_inverse_to_dual(fam, p, q, u);
    EXPECT_TRUE(dual.certificate.is_dual);
    EXPECT_LE(dual.certificate.residual, 1e-10);
}

TEST(LeftInverse, Errors) {
    const GFrameFamily fam = redundant_family(97);
    const Controller p = random_controller(3, 10.0, 98);
    const Controller q = random_controller(3, 10.0, 99);
    const Mat zero = Mat::Zero(3, fam.space.total_dim());
    EXPECT_THROW(left_inverse_to_dual(fam, p, q, zero), NotLeftInverse);
    const GFrameFamily not_dual = scale_family(make_pq_dual(fam, p, q), Complex(3.0, 0.0));
    EXPECT_THROW(dual_to_left_inverse(fam, not_dual, p, q, standard_bases(fam.space)),
                 NotDual);
}

TEST(Thm35, BesselBoundMatchesSynthesisNormWhenRootDefined) {
    const GFrameFamily fam = redundant_family(101);
    const Mat s = frame_operator(fam);
    const Controller p = random_controller(3, 10.0, 102, s);
    const Controller q = random_controller(3, 10.0, 103, s);
    const BesselSynthesisCheck check = bessel_bound_vs_synthesis_norm(fam, p, q);
    EXPECT_LE(check.rel_diff, 1e-10);
}

TEST(Thm35, NonCommutingControllersAreRejected) {
    const auto fx = noncommuting_fixture();
    const Controller q(diag2(2.0, 1.0));
    EXPECT_THROW(bessel_bound_vs_synthesis_norm(fx.family, fx.p, q),
                 NonCommutingControllers);
}
