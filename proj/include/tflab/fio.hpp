#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tflab/gabor.hpp"
#include "tflab/lattice.hpp"
#include "tflab/lattice_matrix.hpp"
#include "tflab/signal.hpp"
#include "tflab/types.hpp"

namespace tflab
{
    /// Phi(x, eta) = 1/2 Ax.x + Bx.eta + 1/2 C eta.eta + eta0.x - x0.eta with A, B, C
    /// symmetric and B invertible.
    struct QuadraticPhase
    {
        RMatrix A, B, C;
        RVector x0, eta0;

        QuadraticPhase(RMatrix A_, RMatrix B_, RMatrix C_, RVector x0_, RVector eta0_);
        /// Phi = x.eta (pseudodifferential case).
        static QuadraticPhase identity(int d);
        /// Phi = x.eta + |x|^2 / 2, canonical map (y, eta) -> (y, y + eta).
        static QuadraticPhase chirp(int d);

        int d() const noexcept { return static_cast<int>(B.rows()); }
        Real value(const RVector& x, const RVector& eta) const;
        RVector grad_x(const RVector& x, const RVector& eta) const;
        RVector grad_eta(const RVector& x, const RVector& eta) const;
        /// Full Hessian [[A, B], [B, C]] in the (x, eta) variables.
        RMatrix hessian() const;
    };

    using PhaseValueFn = std::function<Real(const RVector&, const RVector&)>;
    using PhaseGradFn = std::function<RVector(const RVector&, const RVector&)>;
    using PhaseHessFn = std::function<RMatrix(const RVector&, const RVector&)>;

    /// Phase with value, gradients and mixed Hessian (i, j) = d^2 Phi / dx_i deta_j.
    /// Missing derivatives fall back to central differences, flagged by exact_derivatives().
    struct PhaseSpec
    {
        int d = 1;
        std::string name;
        PhaseValueFn value;
        PhaseGradFn grad_x;
        PhaseGradFn grad_eta;
        PhaseHessFn mixed_hessian;
        std::optional<QuadraticPhase> quadratic;

        static PhaseSpec from_quadratic(const QuadraticPhase& q, std::string name = "quadratic");
        static PhaseSpec from_value(int d, PhaseValueFn value, std::string name = "custom");

        bool exact_derivatives() const noexcept { return grad_x && grad_eta && mixed_hessian; }
        Real operator()(const RVector& x, const RVector& eta) const { return value(x, eta); }
        RVector gx(const RVector& x, const RVector& eta) const;
        RVector geta(const RVector& x, const RVector& eta) const;
        RMatrix hxe(const RVector& x, const RVector& eta) const;
        /// Full 2d x 2d Hessian by central differences of the value (or exact if quadratic).
        RMatrix hessian(const RVector& x, const RVector& eta) const;
    };

    /// Symbol sigma(x, eta) on the phase plane (d = 1).
    class Symbol
    {
    public:
        Symbol(PhaseFn f, std::string name);

        static Symbol one();
        static Symbol zero();
        /// exp(-pi (x^2 + eta^2) / width^2).
        static Symbol gaussian_bump(Real width = 2);
        /// C-infinity bump exp(-k u / (1 - u)), u = r^2 / radius^2, supported in the disk of
        /// `radius`; k = 1 is the classical exp(1 - 1 / (1 - u)). Larger k flattens the edge,
        /// which speeds up the (sub-exponential) decay of its STFT.
        static Symbol compact_bump(Real radius = 2.5, Real steepness = 1);
        /// Fourier multiplier m(eta).
        static Symbol multiplier(std::function<Complex(Real)> m, std::string name = "multiplier");
        /// Bilinear interpolation of a sampled symbol.
        static Symbol sampled(PhaseSpaceFunction s, std::string name = "sampled");

        Complex operator()(Real x, Real eta) const { return f_(x, eta); }
        const std::string& name() const noexcept { return name_; }
        const PhaseFn& fn() const noexcept { return f_; }
        bool is_zero() const noexcept { return zero_; }

    private:
        PhaseFn f_;
        std::string name_;
        bool zero_ = false;
    };

    struct TamenessRegion
    {
        Real half_width = 4;  ///< sample box [-h, h]^{2d}
        int samples = 200;    ///< random sample points (fixed seed)
        unsigned seed = 7;
    };

    struct TamenessReport
    {
        Real max_second = 0;        ///< sup of |second derivatives| (finite differences)
        Real max_third = 0;         ///< sup of |third derivatives|
        Real min_det = 0;           ///< inf |det mixed Hessian|
        Real phase3_sup = 0;        ///< sup |grad_x Phi(x, eta) - grad_x Phi(x', eta)| on the region
        Real phase3_sup_doubled = 0;///< same on the doubled region
        bool nondegenerate = false; ///< min_det >= delta
        bool phase3_bounded = false;///< doubling the region does not grow the sup by more than 25%
        bool exact_derivatives = false;
    };

    TamenessReport tameness_check(const PhaseSpec& phi, const TamenessRegion& region = {}, Real delta = 1e-8);

    enum class ChiMethod
    {
        Auto,        ///< closed form when the phase is quadratic, else Newton
        ClosedForm,
        Newton
    };

    struct NewtonOptions
    {
        int max_iter = 50;
        Real tol = 1e-10;
        Real region = 4;  ///< box used for averaging the mixed Hessian (initializer)
    };

    struct CanonicalPoint
    {
        RVector x, xi;
        Real residual = 0;  ///< |grad_eta Phi(x, eta) - y|
        int iterations = 0;
        ChiMethod method = ChiMethod::ClosedForm;
    };

    /// chi(y, eta) = (x, xi) with y = grad_eta Phi(x, eta), xi = grad_x Phi(x, eta).
    class CanonicalMap
    {
    public:
        explicit CanonicalMap(PhaseSpec phi, ChiMethod method = ChiMethod::Auto, NewtonOptions opts = {});

        CanonicalPoint solve(const RVector& y, const RVector& eta) const;
        /// chi on a phase-space point (y, eta) stacked as a 2d vector.
        RVector operator()(const RVector& point) const;

        const PhaseSpec& phase() const noexcept { return phi_; }
        ChiMethod method() const noexcept { return method_; }
        /// Sampled Lipschitz constant on the averaging region.
        Real lipschitz_estimate(int samples = 100) const;

    private:
        PhaseSpec phi_;
        ChiMethod method_;
        NewtonOptions opts_;
        RMatrix avg_hessian_;
    };

    CanonicalPoint canonical_transform(const PhaseSpec& phi, const RVector& y, const RVector& eta,
                                       ChiMethod method = ChiMethod::Auto, const NewtonOptions& opts = {});

    using PhaseMap = std::function<RVector(const RVector&)>;

    /// chi(lambda) = r_lambda + chi'(lambda), r_lambda in Q.
    struct ChiPrime
    {
        TruncatedLattice lattice;
        Eigen::MatrixXi targets;  ///< integer coordinates of chi'(lambda), one column per lambda
        RMatrix remainders;       ///< r_lambda, one column per lambda
        int fiber_bound = 0;

        LatticeMap map() const { return LatticeMap(lattice, targets); }
    };

    ChiPrime discretize_chi(const PhaseMap& chi, const TruncatedLattice& lattice, const FundamentalDomain& Q);
    /// Fiber bound of chi' on each truncation radius.
    std::vector<int> chi_prime_fiber_profile(const PhaseMap& chi, const Lattice& base, const FundamentalDomain& Q,
                                             const std::vector<Real>& radii);

    /// Dense operator on the samples of a periodic grid: (T f)_j = sum_k kernel(j, k) f_k.
    struct Operator
    {
        Real L = 1;
        Eigen::Index N = 0;
        CMatrix kernel;

        SampledSignal apply(const SampledSignal& f) const;
    };

    /// T f(x) = int exp(2 pi i Phi(x, eta)) sigma(x, eta) fhat(eta) d eta, Riemann sum over
    /// the centered frequency grid.
    Operator fio_operator(const Symbol& sigma, const PhaseSpec& phi, Real L, Eigen::Index N);
    SampledSignal apply_fio(const Symbol& sigma, const PhaseSpec& phi, const SampledSignal& f);

    /// M(T)_{mu, lambda} = <T pi(lambda) g, pi(mu) g>.
    LatticeMatrix gabor_matrix(const Operator& T, const GaborSystem& sys);

    struct QuadraticStftOptions
    {
        Real patch = 4;           ///< window patch [-patch, patch)^2
        Real step = 1.0 / 32;     ///< patch spacing; must be a multiple of the grid dx
    };

    /// |M(T)_{mu, lambda}| = |V_Psi sigma(a, b)| with a = (mu_1, lambda_2),
    /// b = (mu_2 - grad_x Phi(a), lambda_1 - grad_eta Phi(a)) and
    /// Psi(w) = exp(-2 pi i Phi_2(w)) g(w_1) conj(ghat(w_2)), Phi_2(w) = 1/2 w.Hw.
    /// Returns the modulus matrix. Quadratic phases only (UnsupportedError otherwise).
    LatticeMatrix gabor_matrix_quadratic_stft(const Symbol& sigma, const PhaseSpec& phi, const GaborSystem& sys,
                                              const QuadraticStftOptions& opts = {});

    struct DecayFit
    {
        Real C = 0;              ///< sup |M| <d>^s over the used entries (envelope constant)
        Real s = 0;              ///< least-squares slope of -log|M| against log<d>
        Real log_C_ls = 0;       ///< least-squares intercept
        Real residual_rms = 0;
        Eigen::Index used = 0;
        std::vector<Real> bucket_lo;   ///< lower edge of each distance bucket (|chi(lambda) - mu|)
        std::vector<Real> envelope;    ///< sup |M| per bucket (0 for empty buckets)
        bool envelope_monotone = false;
    };

    DecayFit decay_fit(const LatticeMatrix& M, const PhaseMap& chi, Real noise_floor = 1e-12, Real bucket_width = 0.5);
}  // namespace tflab
