#include "tflab/signal.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/FFT>

#include "tflab/lattice.hpp"
#include "tflab/parallel.hpp"

namespace tflab
{
    namespace fft
    {
        namespace
        {
            Eigen::FFT<Real>& engine()
            {
                // kissfft caches twiddles per size; one engine per thread.
                thread_local Eigen::FFT<Real> e = [] {
                    Eigen::FFT<Real> f;
                    f.SetFlag(Eigen::FFT<Real>::Unscaled);
                    return f;
                }();
                return e;
            }
        }  // namespace

        void centered_dft(const Complex* in, Complex* out, Eigen::Index n, bool inverse)
        {
            if (n % 2 != 0)
                throw ParameterError("centered DFT needs an even length");
            // For even n the centering shift is a roll by n/2 on both sides.
            const Eigen::Index h = n / 2;
            thread_local std::vector<Complex> a, b;
            a.resize(n);
            b.resize(n);
            for (Eigen::Index k = 0; k < n; ++k)
                a[k] = in[(k + h) % n];
            if (inverse)
                engine().inv(b.data(), a.data(), n);
            else
                engine().fwd(b.data(), a.data(), n);
            for (Eigen::Index l = 0; l < n; ++l)
                out[(l + h) % n] = b[l];
        }

        CVector centered_dft(const CVector& in, bool inverse)
        {
            CVector out(in.size());
            centered_dft(in.data(), out.data(), in.size(), inverse);
            return out;
        }

        CMatrix centered_dft2(const CMatrix& in, bool inverse)
        {
            CMatrix out(in.rows(), in.cols());
            for (Eigen::Index c = 0; c < in.cols(); ++c)
                centered_dft(in.col(c).data(), out.col(c).data(), in.rows(), inverse);
            CVector row(in.cols()), tmp(in.cols());
            for (Eigen::Index r = 0; r < in.rows(); ++r)
            {
                row = out.row(r).transpose();
                centered_dft(row.data(), tmp.data(), row.size(), inverse);
                out.row(r) = tmp.transpose();
            }
            return out;
        }

        CVector upsample2(const CVector& in)
        {
            const Eigen::Index n = in.size();
            if (n % 2 != 0)
                throw ParameterError("upsampling needs an even length");
            std::vector<Complex> X(n), Y(2 * n, Complex(0)), y(2 * n);
            engine().fwd(X.data(), in.data(), n);
            for (Eigen::Index k = 0; k < n / 2; ++k)
                Y[k] = X[k];
            for (Eigen::Index j = 1; j < n / 2; ++j)
                Y[2 * n - j] = X[n - j];
            // Nyquist bin split evenly between +-n/2 keeps real data real.
            Y[n / 2] = X[n / 2] / 2.0;
            Y[2 * n - n / 2] = X[n / 2] / 2.0;
            engine().inv(y.data(), Y.data(), 2 * n);
            CVector out(2 * n);
            for (Eigen::Index k = 0; k < 2 * n; ++k)
                out[k] = y[k] / static_cast<Real>(n);
            return out;
        }
    }  // namespace fft

    SampledSignal::SampledSignal(int d, Real L, Eigen::Index N) : SampledSignal(d, L, N, CVector())
    {
    }

    SampledSignal::SampledSignal(int d, Real L, Eigen::Index N, CVector data)
        : d_(d), L_(L), N_(N), data_(std::move(data))
    {
        if (d != 1 && d != 2)
            throw UnsupportedError("sampled signals support d = 1 or 2");
        if (!(L > 0))
            throw ParameterError("box side must be positive");
        if (N < 2 || (N & (N - 1)) != 0)
            throw ParameterError("samples per axis must be a power of two");
        const Eigen::Index total = d == 1 ? N : N * N;
        if (data_.size() == 0)
            data_ = CVector::Zero(total);
        else if (data_.size() != total)
            throw ShapeError("sample count does not match the grid");
    }

    Real SampledSignal::norm() const { return std::sqrt(data_.squaredNorm() * std::pow(dx(), d_)); }

    bool SampledSignal::same_grid(const SampledSignal& o) const noexcept
    {
        return d_ == o.d_ && N_ == o.N_ && std::abs(L_ - o.L_) <= 1e-12 * L_;
    }

    void SampledSignal::require_same_grid(const SampledSignal& o) const
    {
        if (!same_grid(o))
            throw ShapeError("signals live on different grids");
    }

    Complex inner(const SampledSignal& f, const SampledSignal& g)
    {
        f.require_same_grid(g);
        return g.data().dot(f.data()) * std::pow(f.dx(), f.d());
    }

    SampledSignal gaussian_window(Real L, Eigen::Index N)
    {
        const Real c = std::pow(2.0, 0.25);
        return SampledSignal::from_function(L, N, [c](Real t) { return Complex(c * std::exp(-kPi * t * t)); });
    }

    PhaseSpaceFunction::PhaseSpaceFunction(Real Lx, Eigen::Index Nx, Real Lw, Eigen::Index Nw)
        : Lx_(Lx), Lw_(Lw), values_(CMatrix::Zero(Nx, Nw))
    {
        if (!(Lx > 0) || !(Lw > 0) || Nx < 1 || Nw < 1)
            throw ParameterError("invalid phase-space grid");
    }

    PhaseSpaceFunction PhaseSpaceFunction::sample(Real Lx, Eigen::Index Nx, Real Lw, Eigen::Index Nw, const PhaseFn& f)
    {
        PhaseSpaceFunction p(Lx, Nx, Lw, Nw);
        for (Eigen::Index k = 0; k < Nw; ++k)
            for (Eigen::Index i = 0; i < Nx; ++i)
                p.values_(i, k) = f(p.x(i), p.w(k));
        return p;
    }

    PhaseSpaceFunction PhaseSpaceFunction::sample_on(const SampledSignal& f, const PhaseFn& sigma)
    {
        return sample(f.L(), f.N(), static_cast<Real>(f.N()) / f.L(), f.N(), sigma);
    }

    Complex PhaseSpaceFunction::interpolate(Real xq, Real wq) const
    {
        const Real u = (xq + Lx_ / 2) / dx();
        const Real v = (wq + Lw_ / 2) / dw();
        const Real iu = std::floor(u), iv = std::floor(v);
        const Real fu = u - iu, fv = v - iv;
        auto at = [&](Eigen::Index i, Eigen::Index k) -> Complex {
            if (i < 0 || k < 0 || i >= Nx() || k >= Nw())
                return 0;
            return values_(i, k);
        };
        const auto i0 = static_cast<Eigen::Index>(iu), k0 = static_cast<Eigen::Index>(iv);
        return (1 - fu) * ((1 - fv) * at(i0, k0) + fv * at(i0, k0 + 1)) +
               fu * ((1 - fv) * at(i0 + 1, k0) + fv * at(i0 + 1, k0 + 1));
    }

    SampledSignal fourier(const SampledSignal& f, bool inverse)
    {
        const Eigen::Index N = f.N();
        // Forward scale dx; the inverse lives on the frequency box where dx' = 1/L.
        const Real scale = f.dx();
        const Real Lout = static_cast<Real>(N) / f.L();
        if (f.d() == 1)
            return SampledSignal(1, Lout, N, fft::centered_dft(f.data(), inverse) * scale);

        using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        const RowMajor in = Eigen::Map<const RowMajor>(f.data().data(), N, N);
        const RowMajor out = fft::centered_dft2(CMatrix(in), inverse) * (scale * scale);
        return SampledSignal(2, Lout, N, Eigen::Map<const CVector>(out.data(), N * N));
    }

    namespace
    {
        void require_1d(const SampledSignal& f, const char* what)
        {
            if (f.d() != 1)
                throw UnsupportedError(std::string(what) + " is implemented for d = 1");
        }

        Eigen::Index positive_mod(Eigen::Index a, Eigen::Index n) { return ((a % n) + n) % n; }
    }  // namespace

    SampledSignal tf_shift(const SampledSignal& f, Real x, Real w, bool* snapped)
    {
        require_1d(f, "tf_shift");
        const Eigen::Index N = f.N();
        const Real steps = x / f.dx();
        const auto s = static_cast<Eigen::Index>(std::llround(steps));
        if (snapped)
            *snapped = std::abs(steps - static_cast<Real>(s)) > 1e-9;
        SampledSignal out(1, f.L(), N);
        for (Eigen::Index j = 0; j < N; ++j)
            out[j] = std::polar(1.0, kTwoPi * w * f.position(j)) * f[positive_mod(j - s, N)];
        return out;
    }

    SampledSignal fractional_shift(const SampledSignal& f, Real x)
    {
        require_1d(f, "fractional_shift");
        SampledSignal F = fourier(f);
        for (Eigen::Index l = 0; l < F.N(); ++l)
            F[l] *= std::polar(1.0, -kTwoPi * F.position(l) * x);
        return fourier(F, true);
    }

    CVector stft(const SampledSignal& f, const SampledSignal& g, const std::vector<TFPoint>& points)
    {
        require_1d(f, "stft");
        f.require_same_grid(g);
        if (!(g.norm() > 0))
            throw ParameterError("stft window must be nonzero");
        CVector out(static_cast<Eigen::Index>(points.size()));
        parallel_for(points.size(), [&](std::size_t i) {
            out[static_cast<Eigen::Index>(i)] = inner(f, tf_shift(g, points[i].x, points[i].w));
        });
        return out;
    }

    PhaseSpaceFunction stft_grid(const SampledSignal& f, const SampledSignal& g, Eigen::Index time_stride)
    {
        require_1d(f, "stft_grid");
        f.require_same_grid(g);
        const Eigen::Index N = f.N();
        if (time_stride < 1 || N % time_stride != 0)
            throw ParameterError("time stride must divide the sample count");
        const Eigen::Index Nx = N / time_stride;
        PhaseSpaceFunction V(f.L(), Nx, static_cast<Real>(N) / f.L(), N);
        const Real dx = f.dx();
        parallel_for(static_cast<std::size_t>(Nx), [&](std::size_t ii) {
            const auto i = static_cast<Eigen::Index>(ii);
            const Eigen::Index s = i * time_stride - N / 2;  // shift in samples, x_i = s dx
            CVector h(N), H(N);
            for (Eigen::Index j = 0; j < N; ++j)
                h[j] = f[j] * std::conj(g[positive_mod(j - s, N)]);
            fft::centered_dft(h.data(), H.data(), N);
            V.values().row(i) = H.transpose() * dx;
        });
        return V;
    }

    ModulationNormEstimate modulation_norm_estimate(const SampledSignal& f, const SampledSignal& g, Real p, Real q,
                                                    const WeightFn& m, Eigen::Index time_stride, Real tail_threshold)
    {
        detail::check_exponent(p);
        detail::check_exponent(q);
        const PhaseSpaceFunction V = stft_grid(f, g, time_stride);
        const Real hx = V.dx(), hw = V.dw();
        RMatrix weighted(V.Nx(), V.Nw());
        Real total = 0, shell = 0;
        RVector r(2);
        for (Eigen::Index k = 0; k < V.Nw(); ++k)
            for (Eigen::Index i = 0; i < V.Nx(); ++i)
            {
                r << V.x(i), V.w(k);
                const Real a = std::abs(V(i, k));
                weighted(i, k) = a * m(r);
                total += a * a;
                if (std::abs(r[0]) >= 0.4 * V.Lx() || std::abs(r[1]) >= 0.4 * V.Lw())
                    shell += a * a;
            }
        // Riemann weights: hx^{1/p} inside, hw^{1/q} outside.
        const Real cx = std::isinf(p) ? 1 : std::pow(hx, 1 / p);
        const Real cw = std::isinf(q) ? 1 : std::pow(hw, 1 / q);
        ModulationNormEstimate est;
        est.value = lpq_norm(weighted, p, q) * cx * cw;
        est.tail = total > 0 ? shell / total : 0;
        est.accurate = est.tail <= tail_threshold;
        return est;
    }

    PhaseFn gaussian_phase_window()
    {
        return [](Real x, Real w) { return Complex(std::sqrt(2.0) * std::exp(-kPi * (x * x + w * w))); };
    }

    DecayProfile decay_at_infinity_profile(const PhaseSpaceFunction& sigma, const PhaseFn& window,
                                           std::vector<Real> radii, const DecayProfileOptions& opts)
    {
        if (radii.empty())
            throw ParameterError("decay profile needs at least one radius");
        if (opts.z_stride_x < 1 || opts.z_stride_w < 1)
            throw ParameterError("shift strides must be positive");
        std::sort(radii.begin(), radii.end());
        const Eigen::Index Nx = sigma.Nx(), Nw = sigma.Nw();
        if (Nx % 2 != 0 || Nw % 2 != 0)
            throw ParameterError("decay profile needs an even phase-space grid");
        const Real hx = sigma.dx(), hw = sigma.dw();

        // Window on all grid offsets: Psi(a hx, b hw), a in (-Nx, Nx), b in (-Nw, Nw).
        CMatrix psi(2 * Nx - 1, 2 * Nw - 1);
        for (Eigen::Index b = 0; b < 2 * Nw - 1; ++b)
            for (Eigen::Index a = 0; a < 2 * Nx - 1; ++a)
                psi(a, b) = std::conj(window(static_cast<Real>(a - (Nx - 1)) * hx, static_cast<Real>(b - (Nw - 1)) * hw));

        const Eigen::Index nzx = (Nx + opts.z_stride_x - 1) / opts.z_stride_x;
        const Eigen::Index nzw = (Nw + opts.z_stride_w - 1) / opts.z_stride_w;
        const std::size_t nb = radii.size() + 1;
        std::vector<std::vector<Real>> binmax(static_cast<std::size_t>(nzx * nzw), std::vector<Real>(nb, 0));

        parallel_for(static_cast<std::size_t>(nzx * nzw), [&](std::size_t t) {
            const Eigen::Index zi = static_cast<Eigen::Index>(t) / nzw * opts.z_stride_x;
            const Eigen::Index zk = static_cast<Eigen::Index>(t) % nzw * opts.z_stride_w;
            CMatrix h(Nx, Nw);
            for (Eigen::Index k = 0; k < Nw; ++k)
                for (Eigen::Index i = 0; i < Nx; ++i)
                    h(i, k) = sigma(i, k) * psi(i - zi + Nx - 1, k - zk + Nw - 1);
            const CMatrix H = fft::centered_dft2(h);
            const Real zx = sigma.x(zi), zw = sigma.w(zk);
            auto& bins = binmax[t];
            for (Eigen::Index b = 0; b < Nw; ++b)
                for (Eigen::Index a = 0; a < Nx; ++a)
                {
                    const Real zx2 = static_cast<Real>(a - Nx / 2) / sigma.Lx();
                    const Real zw2 = static_cast<Real>(b - Nw / 2) / sigma.Lw();
                    const Real rad = std::sqrt(zx * zx + zw * zw + zx2 * zx2 + zw2 * zw2);
                    const auto bin = static_cast<std::size_t>(std::upper_bound(radii.begin(), radii.end(), rad) - radii.begin());
                    bins[bin] = std::max(bins[bin], std::abs(H(a, b)) * hx * hw);
                }
        });

        // bin j holds points with radii[j-1] <= rad < radii[j]; t(R_i) = max over bins > i.
        std::vector<Real> merged(nb, 0);
        for (const auto& bins : binmax)
            for (std::size_t j = 0; j < nb; ++j)
                merged[j] = std::max(merged[j], bins[j]);
        DecayProfile prof;
        prof.radii = radii;
        prof.theta = opts.theta;
        prof.tails.assign(radii.size(), 0);
        Real run = 0;
        for (std::size_t j = nb; j-- > 1;)
        {
            run = std::max(run, merged[j]);
            prof.tails[j - 1] = run;
        }
        const Real t0 = std::max(run, merged[0]);
        prof.ratio = t0 > 0 ? prof.tails.back() / t0 : 0;
        prof.consistent = prof.ratio <= opts.theta;
        return prof;
    }

    PhaseSpaceFunction cross_wigner(const SampledSignal& f, const SampledSignal& g)
    {
        require_1d(f, "cross_wigner");
        f.require_same_grid(g);
        const Eigen::Index N = f.N();
        const Real dx = f.dx();
        // Half-sample translates f(t + dx/2), g(t + dx/2) for odd lags.
        const SampledSignal fh = fractional_shift(f, -dx / 2);
        const SampledSignal gh = fractional_shift(g, -dx / 2);
        auto get = [N](const SampledSignal& s, Eigen::Index j) -> Complex { return j < 0 || j >= N ? Complex(0) : s[j]; };

        PhaseSpaceFunction W(f.L(), N, static_cast<Real>(N) / f.L(), N);
        parallel_for(static_cast<std::size_t>(N), [&](std::size_t jj) {
            const auto j = static_cast<Eigen::Index>(jj);
            CVector K = CVector::Zero(N), out(N);
            // lag m in [-N, N): t = m dx; fold m onto the centered index (m + N/2) mod N.
            for (Eigen::Index m = -N; m < N; ++m)
            {
                Complex v;
                if (m % 2 == 0)
                {
                    const Eigen::Index k = m / 2;
                    v = get(f, j + k) * std::conj(get(g, j - k));
                }
                else
                {
                    const Eigen::Index k = (m - 1) / 2;  // m = 2k + 1
                    v = get(fh, j + k) * std::conj(get(gh, j - k - 1));
                }
                K[positive_mod(m + N / 2, N)] += v;
            }
            fft::centered_dft(K.data(), out.data(), N);
            W.values().row(j) = out.transpose() * dx;
        });
        return W;
    }
}  // namespace tflab
