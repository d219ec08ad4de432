#include "tflab/psdo.hpp"

#include <cmath>
#include <mutex>
#include <random>

#include "tflab/parallel.hpp"

namespace tflab
{
    namespace
    {
        Eigen::Index positive_mod(Eigen::Index a, Eigen::Index n) { return ((a % n) + n) % n; }

        void require_signal_grid(const PhaseSpaceFunction& s)
        {
            const Real expected_Lw = static_cast<Real>(s.Nx()) / s.Lx();
            if (s.Nx() != s.Nw() || std::abs(s.Lw() - expected_Lw) > 1e-12 * expected_Lw)
                throw ShapeError("symbol must be sampled on the signal's phase-space grid");
        }

        // Weyl kernel on the periodic grid. Pair (j, k) has lag d = j - k taken in
        // [-N/2, N/2) and midpoint (x_j + x_k) / 2 at half-grid index h = 2j - d mod 2N;
        // row_at(h) returns the symbol on that midpoint row, h in [0, 2N).
        template <class MidFn>
        Operator weyl_from_midpoints(Real L, Eigen::Index N, MidFn&& row_at)
        {
            Operator T{L, N, CMatrix::Zero(N, N)};
            const Real scale = (L / static_cast<Real>(N)) / L;
            CMatrix F(N, 2 * N);
            parallel_for(static_cast<std::size_t>(2 * N), [&](std::size_t hh) {
                const CVector s = row_at(static_cast<Eigen::Index>(hh));
                // F(n, h) = sum_l s_l exp(+2 pi i (n - N/2)(l - N/2) / N), n - N/2 = lag
                fft::centered_dft(s.data(), F.col(static_cast<Eigen::Index>(hh)).data(), N, true);
            });
            parallel_for(static_cast<std::size_t>(N), [&](std::size_t jj) {
                const auto j = static_cast<Eigen::Index>(jj);
                for (Eigen::Index k = 0; k < N; ++k)
                {
                    const Eigen::Index lag = positive_mod(j - k + N / 2, N) - N / 2;
                    const Eigen::Index h = positive_mod(2 * j - lag, 2 * N);
                    T.kernel(j, k) = F(lag + N / 2, h) * scale;
                }
            });
            return T;
        }
    }  // namespace

    Operator kn_operator(const Symbol& tau, Real L, Eigen::Index N)
    {
        return fio_operator(tau, PhaseSpec::from_quadratic(QuadraticPhase::identity(1), "x.eta"), L, N);
    }

    Operator kn_operator(const PhaseSpaceFunction& tau)
    {
        require_signal_grid(tau);
        const Eigen::Index N = tau.Nx();
        const Real L = tau.Lx();
        const Real dx = tau.dx();
        Operator T{L, N, CMatrix(N, N)};
        parallel_for(static_cast<std::size_t>(N), [&](std::size_t jj) {
            const auto j = static_cast<Eigen::Index>(jj);
            CVector E(N), row(N);
            for (Eigen::Index l = 0; l < N; ++l)
                E[l] = std::polar(1.0, kTwoPi * static_cast<Real>((j - N / 2) * (l - N / 2)) / static_cast<Real>(N)) *
                       tau(j, l) / L;
            fft::centered_dft(E.data(), row.data(), N);
            T.kernel.row(j) = row.transpose() * dx;
        });
        return T;
    }

    Operator weyl_operator(const Symbol& sigma, Real L, Eigen::Index N)
    {
        const Real dx = L / static_cast<Real>(N);
        return weyl_from_midpoints(L, N, [&](Eigen::Index h) {
            const Real mid = static_cast<Real>(h) * dx / 2 - L / 2;
            CVector s(N);
            for (Eigen::Index l = 0; l < N; ++l)
                s[l] = sigma(mid, static_cast<Real>(l - N / 2) / L);
            return s;
        });
    }

    Operator weyl_operator(const PhaseSpaceFunction& sigma)
    {
        require_signal_grid(sigma);
        const Eigen::Index N = sigma.Nx();
        // Upsample every frequency column along x: row h of `fine` sits at h dx / 2 - L/2.
        CMatrix fine(2 * N, N);
        for (Eigen::Index l = 0; l < N; ++l)
            fine.col(l) = fft::upsample2(sigma.values().col(l));
        return weyl_from_midpoints(sigma.Lx(), N, [&](Eigen::Index h) -> CVector { return fine.row(h).transpose(); });
    }

    Operator psdo_operator(const PSDOSymbol& s, Real L, Eigen::Index N)
    {
        return s.form == SymbolForm::KN ? kn_operator(s.sigma, L, N) : weyl_operator(s.sigma, L, N);
    }

    SampledSignal apply_psdo(const PSDOSymbol& s, const SampledSignal& f)
    {
        return psdo_operator(s, f.L(), f.N()).apply(f);
    }

    namespace
    {
        PhaseSpaceFunction apply_multiplier(const PhaseSpaceFunction& sigma, int sign)
        {
            const CMatrix S = fft::centered_dft2(sigma.values());
            CMatrix T(S.rows(), S.cols());
            for (Eigen::Index b = 0; b < S.cols(); ++b)
                for (Eigen::Index a = 0; a < S.rows(); ++a)
                {
                    const Real xi = static_cast<Real>(a - S.rows() / 2) / sigma.Lx();
                    const Real t = static_cast<Real>(b - S.cols() / 2) / sigma.Lw();
                    T(a, b) = S(a, b) * std::polar(1.0, sign * kPi * xi * t);
                }
            PhaseSpaceFunction out = sigma;
            out.values() = fft::centered_dft2(T, true) / static_cast<Real>(S.rows() * S.cols());
            return out;
        }

        bool sign_passes(int sign)
        {
            const Real L = 8;
            const Eigen::Index N = 64;
            const Real Lw = static_cast<Real>(N) / L;
            const PhaseSpaceFunction sigma = PhaseSpaceFunction::sample(L, N, Lw, N, [](Real x, Real w) {
                return std::exp(-kPi * ((x - 0.5) * (x - 0.5) + (w + 0.3) * (w + 0.3)) / 2) * Complex(1, 0.5 * x * w);
            });
            const CMatrix Kw = weyl_operator(sigma).kernel;
            const CMatrix Kk = kn_operator(apply_multiplier(sigma, sign)).kernel;
            return (Kw - Kk).cwiseAbs().maxCoeff() <= 1e-4 * Kw.cwiseAbs().maxCoeff();
        }
    }  // namespace

    int weyl_to_kn_sign()
    {
        static std::once_flag once;
        static int sign = 0;
        std::call_once(once, [] {
            if (sign_passes(+1))
                sign = +1;
            else if (sign_passes(-1))
                sign = -1;
        });
        if (sign == 0)
            throw ConsistencyError("Weyl/Kohn-Nirenberg conversion failed its self-test for both signs");
        return sign;
    }

    PhaseSpaceFunction convert_form(const PhaseSpaceFunction& sigma, SymbolForm from, SymbolForm to)
    {
        if (from == to)
            return sigma;
        const int s = weyl_to_kn_sign();
        return apply_multiplier(sigma, from == SymbolForm::Weyl ? s : -s);
    }

    Operator localization_operator(const LocalizationSpec& spec)
    {
        const SampledSignal& p1 = spec.phi1;
        const SampledSignal& p2 = spec.phi2;
        p1.require_same_grid(p2);
        const Eigen::Index N = p1.N();
        const Real L = p1.L(), dx = p1.dx();
        const PhaseSpaceFunction a = PhaseSpaceFunction::sample_on(p1, spec.a);

        // A(j,k) = dx^2/L sum_i phi2(t_j - x_i) conj(phi1(t_k - x_i)) ahat_i(j - k)
        std::vector<CVector> ahat(static_cast<std::size_t>(N));
        for (Eigen::Index i = 0; i < N; ++i)
            ahat[static_cast<std::size_t>(i)] = fft::centered_dft(CVector(a.values().row(i).transpose()), true);
        auto sample = [&](const SampledSignal& s, Eigen::Index offset) { return s[positive_mod(offset + N / 2, N)]; };

        Operator T{L, N, CMatrix::Zero(N, N)};
        parallel_for(static_cast<std::size_t>(N), [&](std::size_t jj) {
            const auto j = static_cast<Eigen::Index>(jj);
            for (Eigen::Index i = 0; i < N; ++i)
            {
                const Complex left = sample(p2, j - i);
                if (std::abs(left) < 1e-300)
                    continue;
                const CVector& ah = ahat[static_cast<std::size_t>(i)];
                for (Eigen::Index k = 0; k < N; ++k)
                    T.kernel(j, k) += left * std::conj(sample(p1, k - i)) * ah[positive_mod(j - k + N / 2, N)];
            }
        });
        T.kernel *= dx * dx / L;
        return T;
    }

    LocalizationWeyl localization_to_weyl(const LocalizationSpec& spec, Real tol)
    {
        const PhaseSpaceFunction a = PhaseSpaceFunction::sample_on(spec.phi1, spec.a);
        const PhaseSpaceFunction W = cross_wigner(spec.phi2, spec.phi1);
        const Real n = static_cast<Real>(a.Nx() * a.Nw());
        PhaseSpaceFunction sym = a;
        const CMatrix prod = fft::centered_dft2(a.values()).cwiseProduct(fft::centered_dft2(W.values()));
        sym.values() = fft::centered_dft2(prod, true) * (a.dx() * a.dw() / n);

        LocalizationWeyl out{sym, 0};
        const CMatrix Kw = weyl_operator(sym).kernel;
        const CMatrix Kd = localization_operator(spec).kernel;
        const Real top = Kd.cwiseAbs().maxCoeff();
        out.verification_error = top > 0 ? (Kw - Kd).cwiseAbs().maxCoeff() / top : Kw.cwiseAbs().maxCoeff();
        if (!(out.verification_error <= tol))
            throw ConsistencyError("localization operator and its Weyl form differ by " +
                                   std::to_string(out.verification_error));
        return out;
    }

    IdentityCheck weyl_gabor_identity_check(const Symbol& sigma, const GaborSystem& sys,
                                            const std::vector<IdentityPair>& pairs, Real floor)
    {
        const SampledSignal& g = sys.window();
        const Eigen::Index N = sys.N();
        const Real L = sys.L(), dx = sys.dx(), dw = 1 / L;
        const Operator T = weyl_operator(sigma, L, N);
        const PhaseSpaceFunction W = cross_wigner(g, g);
        const PhaseSpaceFunction S = PhaseSpaceFunction::sample_on(g, sigma.fn());
        const Lattice& base = sys.lattice().base();

        // W(g, g) is negligible beyond 3 units in either variable.
        const auto px = static_cast<Eigen::Index>(std::ceil(3 / dx));
        const auto pw = static_cast<Eigen::Index>(std::ceil(3 / dw));

        IdentityCheck chk;
        chk.pairs = static_cast<Eigen::Index>(pairs.size());
        std::vector<Real> dev(pairs.size(), -1);
        parallel_for(pairs.size(), [&](std::size_t t) {
            const RVector lam = base.point(pairs[t].lambda);
            const RVector mu = base.point(pairs[t].mu);
            const SampledSignal a = tf_shift(g, lam[0], lam[1]);
            const SampledSignal b = tf_shift(g, lam[0] + mu[0], lam[1] + mu[1]);
            const Real lhs = std::abs(inner(T.apply(a), b));

            // V_W sigma(z, zeta) with z = lambda + mu/2 on the grid, zeta = (mu_2, -mu_1).
            const Real zx = lam[0] + mu[0] / 2, zw = lam[1] + mu[1] / 2;
            const Real sx = zx / dx, sw = zw / dw;
            if (std::abs(sx - std::round(sx)) > 1e-9 || std::abs(sw - std::round(sw)) > 1e-9)
                throw ParameterError("lambda + mu/2 is off the phase-space grid; refine the grid");
            const Eigen::Index cx = std::llround(sx) + N / 2, cw = std::llround(sw) + N / 2;
            const Real zeta1 = mu[1], zeta2 = -mu[0];
            Complex acc = 0;
            for (Eigen::Index k = std::max<Eigen::Index>(0, cw - pw); k <= std::min<Eigen::Index>(N - 1, cw + pw); ++k)
                for (Eigen::Index i = std::max<Eigen::Index>(0, cx - px); i <= std::min<Eigen::Index>(N - 1, cx + px); ++i)
                {
                    const Eigen::Index wi = i - cx + N / 2, wk = k - cw + N / 2;
                    if (wi < 0 || wi >= N || wk < 0 || wk >= N)
                        continue;
                    acc += S(i, k) * std::conj(W(wi, wk)) * std::polar(1.0, -kTwoPi * (zeta1 * S.x(i) + zeta2 * S.w(k)));
                }
            const Real rhs = std::abs(acc) * dx * dw;
            if (lhs >= floor)
                dev[t] = std::abs(lhs - rhs) / lhs;
        });
        for (std::size_t t = 0; t < pairs.size(); ++t)
        {
            if (dev[t] < 0)
                continue;
            ++chk.compared;
            if (dev[t] > chk.max_dev || chk.compared == 1)
            {
                chk.max_dev = std::max(chk.max_dev, dev[t]);
                chk.worst = pairs[t];
            }
        }
        return chk;
    }

    std::vector<IdentityPair> sample_identity_pairs(const TruncatedLattice& lattice, std::size_t count, int max_offset,
                                                    unsigned seed)
    {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<Eigen::Index> pick(0, lattice.size() - 1);
        std::uniform_int_distribution<int> off(-max_offset, max_offset);
        std::vector<IdentityPair> out;
        while (out.size() < count)
        {
            IdentityPair p;
            p.lambda = lattice.coords(pick(rng));
            p.mu.resize(p.lambda.size());
            for (Eigen::Index i = 0; i < p.mu.size(); ++i)
                p.mu[i] = off(rng);
            if (lattice.index_of(IVector(p.lambda + p.mu)))
                out.push_back(std::move(p));
        }
        return out;
    }
}  // namespace tflab
