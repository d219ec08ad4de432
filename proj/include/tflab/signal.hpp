#pragma once

#include <functional>
#include <vector>

#include "tflab/weights.hpp"
#include "tflab/types.hpp"

namespace tflab
{
    /// Function on the phase plane (d = 1): (x, w) -> complex.
    using PhaseFn = std::function<Complex(Real, Real)>;

    namespace fft
    {
        /// Unnormalized centered DFT: out_l = sum_k in_k exp(-+2 pi i (l - n/2)(k - n/2) / n),
        /// minus sign forward, plus sign inverse. n must be even.
        void centered_dft(const Complex* in, Complex* out, Eigen::Index n, bool inverse = false);
        CVector centered_dft(const CVector& in, bool inverse = false);
        /// Centered DFT along both axes of a matrix.
        CMatrix centered_dft2(const CMatrix& in, bool inverse = false);
        /// Trigonometric interpolation onto the twice finer periodic grid (same origin).
        CVector upsample2(const CVector& in);
    }  // namespace fft

    /// Samples of a function on the periodic box [-L/2, L/2)^d, N points per axis,
    /// positions j dx - L/2, row-major for d = 2.
    class SampledSignal
    {
    public:
        SampledSignal() = default;
        SampledSignal(int d, Real L, Eigen::Index N);
        SampledSignal(int d, Real L, Eigen::Index N, CVector data);

        /// d = 1 signal from a pointwise function.
        template <class F>
        static SampledSignal from_function(Real L, Eigen::Index N, F&& f)
        {
            SampledSignal s(1, L, N);
            for (Eigen::Index j = 0; j < N; ++j)
                s.data_[j] = f(s.position(j));
            return s;
        }

        int d() const noexcept { return d_; }
        Real L() const noexcept { return L_; }
        Eigen::Index N() const noexcept { return N_; }
        Real dx() const noexcept { return L_ / static_cast<Real>(N_); }
        Eigen::Index size() const noexcept { return data_.size(); }
        Real position(Eigen::Index j) const noexcept { return static_cast<Real>(j) * dx() - L_ / 2; }

        const CVector& data() const noexcept { return data_; }
        CVector& data() noexcept { return data_; }
        Complex operator[](Eigen::Index j) const { return data_[j]; }
        Complex& operator[](Eigen::Index j) { return data_[j]; }

        /// L^2 norm by the Riemann sum.
        Real norm() const;
        bool same_grid(const SampledSignal& o) const noexcept;
        void require_same_grid(const SampledSignal& o) const;

    private:
        int d_ = 1;
        Real L_ = 1;
        Eigen::Index N_ = 0;
        CVector data_;
    };

    /// <f, g> = sum f conj(g) dx^d.
    Complex inner(const SampledSignal& f, const SampledSignal& g);

    /// Unit-norm Gaussian 2^{1/4} exp(-pi t^2) on [-L/2, L/2).
    SampledSignal gaussian_window(Real L, Eigen::Index N);

    /// Values on the grid [-Lx/2, Lx/2) x [-Lw/2, Lw/2) with Nx x Nw samples;
    /// used for symbols, Wigner distributions and sampled STFTs.
    class PhaseSpaceFunction
    {
    public:
        PhaseSpaceFunction() = default;
        PhaseSpaceFunction(Real Lx, Eigen::Index Nx, Real Lw, Eigen::Index Nw);

        static PhaseSpaceFunction sample(Real Lx, Eigen::Index Nx, Real Lw, Eigen::Index Nw, const PhaseFn& f);
        /// Grid matching a signal: x on its samples, w on its centered frequency grid.
        static PhaseSpaceFunction sample_on(const SampledSignal& f, const PhaseFn& sigma);

        Real Lx() const noexcept { return Lx_; }
        Real Lw() const noexcept { return Lw_; }
        Eigen::Index Nx() const noexcept { return values_.rows(); }
        Eigen::Index Nw() const noexcept { return values_.cols(); }
        Real dx() const noexcept { return Lx_ / static_cast<Real>(Nx()); }
        Real dw() const noexcept { return Lw_ / static_cast<Real>(Nw()); }
        Real x(Eigen::Index i) const noexcept { return static_cast<Real>(i) * dx() - Lx_ / 2; }
        Real w(Eigen::Index k) const noexcept { return static_cast<Real>(k) * dw() - Lw_ / 2; }

        const CMatrix& values() const noexcept { return values_; }
        CMatrix& values() noexcept { return values_; }
        Complex operator()(Eigen::Index i, Eigen::Index k) const { return values_(i, k); }

        /// Bilinear interpolation; zero outside the box.
        Complex interpolate(Real x, Real w) const;

    private:
        Real Lx_ = 1;
        Real Lw_ = 1;
        CMatrix values_;
    };

    /// Unitary Fourier transform on the centered grid. The transform of a signal
    /// on (L, N) lives on the frequency box of side N / L with step 1 / L, so the
    /// result is a SampledSignal with L' = N / L; `inverse` undoes it.
    SampledSignal fourier(const SampledSignal& f, bool inverse = false);

    /// pi(x, w) f = M_w T_x f, (T_x f)(t) = f(t - x), periodic wrap. x is snapped to
    /// the nearest multiple of dx; `snapped` (if given) reports whether it moved.
    SampledSignal tf_shift(const SampledSignal& f, Real x, Real w, bool* snapped = nullptr);

    /// Band-limited translation by an arbitrary x (phase ramp in frequency).
    SampledSignal fractional_shift(const SampledSignal& f, Real x);

    struct TFPoint
    {
        Real x = 0;
        Real w = 0;
    };

    /// V_g f(x, w) = <f, M_w T_x g> dx at each requested point (x snapped to the grid).
    CVector stft(const SampledSignal& f, const SampledSignal& g, const std::vector<TFPoint>& points);

    /// V_g f on all time shifts j * stride and all N centered frequencies; one FFT per shift.
    PhaseSpaceFunction stft_grid(const SampledSignal& f, const SampledSignal& g, Eigen::Index time_stride = 1);

    struct ModulationNormEstimate
    {
        Real value = 0;
        Real tail = 0;          ///< share of |V_g f|^2 mass in the outer 10% shell of the grid
        bool accurate = true;   ///< tail below the threshold
    };

    /// Quadrature of || V_g f m ||_{L^{p,q}} over the stft_grid (inner x with p, outer w with q).
    ModulationNormEstimate modulation_norm_estimate(const SampledSignal& f, const SampledSignal& g, Real p, Real q,
                                                    const WeightFn& m, Eigen::Index time_stride = 1,
                                                    Real tail_threshold = 1e-6);

    struct DecayProfileOptions
    {
        Eigen::Index z_stride_x = 4;  ///< shift spacing in samples of sigma's grid
        Eigen::Index z_stride_w = 4;
        Real theta = 1e-3;
    };

    /// t(R) = sup{ |V_Psi sigma(z, zeta)| : |(z, zeta)| >= R } on the computed grid.
    struct DecayProfile
    {
        std::vector<Real> radii;
        std::vector<Real> tails;
        Real theta = 0;
        Real ratio = 0;          ///< t(R_max) / t(0)
        bool consistent = false; ///< finite-scale M^0 proxy: ratio <= theta
    };

    DecayProfile decay_at_infinity_profile(const PhaseSpaceFunction& sigma, const PhaseFn& window,
                                           std::vector<Real> radii, const DecayProfileOptions& opts = {});

    /// L^2-normalized Gaussian on the phase plane, 2^{1/2} exp(-pi (x^2 + w^2)).
    PhaseFn gaussian_phase_window();

    /// W(f, g)(x, w) = int f(x + t/2) conj(g(x - t/2)) exp(-2 pi i w t) dt on the N x N grid
    /// (x: the signal samples, w: the centered frequency grid). Signals are zero-extended,
    /// not wrapped, so no periodic ghost terms appear.
    PhaseSpaceFunction cross_wigner(const SampledSignal& f, const SampledSignal& g);
}  // namespace tflab
