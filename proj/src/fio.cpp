#include "tflab/fio.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "tflab/parallel.hpp"

namespace tflab
{
    namespace
    {
        bool symmetric(const RMatrix& M) { return (M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1 + M.cwiseAbs().maxCoeff()); }

        RVector scalar_vec(Real v) { return RVector::Constant(1, v); }
    }  // namespace

    QuadraticPhase::QuadraticPhase(RMatrix A_, RMatrix B_, RMatrix C_, RVector x0_, RVector eta0_)
        : A(std::move(A_)), B(std::move(B_)), C(std::move(C_)), x0(std::move(x0_)), eta0(std::move(eta0_))
    {
        const Eigen::Index d = B.rows();
        if (d < 1 || B.cols() != d || A.rows() != d || A.cols() != d || C.rows() != d || C.cols() != d ||
            x0.size() != d || eta0.size() != d)
            throw ShapeError("quadratic phase blocks must be d x d with d-vectors");
        if (!symmetric(A) || !symmetric(B) || !symmetric(C))
            throw ParameterError("quadratic phase needs symmetric A, B, C");
        if (std::abs(B.determinant()) < 1e-12)
            throw ParameterError("quadratic phase needs a nondegenerate B");
    }

    QuadraticPhase QuadraticPhase::identity(int d)
    {
        return QuadraticPhase(RMatrix::Zero(d, d), RMatrix::Identity(d, d), RMatrix::Zero(d, d), RVector::Zero(d), RVector::Zero(d));
    }

    QuadraticPhase QuadraticPhase::chirp(int d)
    {
        return QuadraticPhase(RMatrix::Identity(d, d), RMatrix::Identity(d, d), RMatrix::Zero(d, d), RVector::Zero(d), RVector::Zero(d));
    }

    Real QuadraticPhase::value(const RVector& x, const RVector& eta) const
    {
        return 0.5 * x.dot(A * x) + eta.dot(B * x) + 0.5 * eta.dot(C * eta) + eta0.dot(x) - x0.dot(eta);
    }

    RVector QuadraticPhase::grad_x(const RVector& x, const RVector& eta) const { return A * x + B * eta + eta0; }

    RVector QuadraticPhase::grad_eta(const RVector& x, const RVector& eta) const { return B * x + C * eta - x0; }

    RMatrix QuadraticPhase::hessian() const
    {
        const int n = d();
        RMatrix H(2 * n, 2 * n);
        H << A, B, B, C;
        return H;
    }

    PhaseSpec PhaseSpec::from_quadratic(const QuadraticPhase& q, std::string name)
    {
        PhaseSpec p;
        p.d = q.d();
        p.name = std::move(name);
        p.quadratic = q;
        p.value = [q](const RVector& x, const RVector& e) { return q.value(x, e); };
        p.grad_x = [q](const RVector& x, const RVector& e) { return q.grad_x(x, e); };
        p.grad_eta = [q](const RVector& x, const RVector& e) { return q.grad_eta(x, e); };
        p.mixed_hessian = [q](const RVector&, const RVector&) { return q.B; };
        return p;
    }

    PhaseSpec PhaseSpec::from_value(int d, PhaseValueFn value, std::string name)
    {
        if (d < 1 || !value)
            throw ParameterError("phase needs d >= 1 and a value evaluator");
        PhaseSpec p;
        p.d = d;
        p.name = std::move(name);
        p.value = std::move(value);
        return p;
    }

    namespace
    {
        constexpr Real kFdStep = 1e-5;

        RVector fd_gradient(const PhaseSpec& p, const RVector& x, const RVector& e, bool wrt_x)
        {
            RVector g(p.d);
            for (int i = 0; i < p.d; ++i)
            {
                RVector xp = x, xm = x, ep = e, em = e;
                if (wrt_x)
                {
                    xp[i] += kFdStep;
                    xm[i] -= kFdStep;
                }
                else
                {
                    ep[i] += kFdStep;
                    em[i] -= kFdStep;
                }
                g[i] = (p.value(xp, ep) - p.value(xm, em)) / (2 * kFdStep);
            }
            return g;
        }
    }  // namespace

    RVector PhaseSpec::gx(const RVector& x, const RVector& eta) const
    {
        return grad_x ? grad_x(x, eta) : fd_gradient(*this, x, eta, true);
    }

    RVector PhaseSpec::geta(const RVector& x, const RVector& eta) const
    {
        return grad_eta ? grad_eta(x, eta) : fd_gradient(*this, x, eta, false);
    }

    RMatrix PhaseSpec::hxe(const RVector& x, const RVector& eta) const
    {
        if (mixed_hessian)
            return mixed_hessian(x, eta);
        // Column j: derivative of grad_x along eta_j.
        RMatrix H(d, d);
        for (int j = 0; j < d; ++j)
        {
            RVector ep = eta, em = eta;
            ep[j] += kFdStep;
            em[j] -= kFdStep;
            H.col(j) = (gx(x, ep) - gx(x, em)) / (2 * kFdStep);
        }
        return H;
    }

    RMatrix PhaseSpec::hessian(const RVector& x, const RVector& eta) const
    {
        if (quadratic)
            return quadratic->hessian();
        const int n = 2 * d;
        RVector z(n);
        z << x, eta;
        auto val = [&](const RVector& p) { return value(p.head(d), p.tail(d)); };
        const Real h = 1e-4;
        RMatrix H(n, n);
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b)
            {
                RVector pp = z, pm = z, mp = z, mm = z;
                pp[a] += h, pp[b] += h;
                pm[a] += h, pm[b] -= h;
                mp[a] -= h, mp[b] += h;
                mm[a] -= h, mm[b] -= h;
                H(a, b) = H(b, a) = (val(pp) - val(pm) - val(mp) + val(mm)) / (4 * h * h);
            }
        return H;
    }

    Symbol::Symbol(PhaseFn f, std::string name) : f_(std::move(f)), name_(std::move(name))
    {
        if (!f_)
            throw ParameterError("symbol needs an evaluator");
    }

    Symbol Symbol::one() { return Symbol([](Real, Real) { return Complex(1); }, "one"); }

    Symbol Symbol::zero()
    {
        Symbol s([](Real, Real) { return Complex(0); }, "zero");
        s.zero_ = true;
        return s;
    }

    Symbol Symbol::gaussian_bump(Real width)
    {
        if (!(width > 0))
            throw ParameterError("bump width must be positive");
        return Symbol([width](Real x, Real e) { return Complex(std::exp(-kPi * (x * x + e * e) / (width * width))); },
                      "gaussian-bump");
    }

    Symbol Symbol::compact_bump(Real radius, Real steepness)
    {
        if (!(radius > 0) || !(steepness > 0))
            throw ParameterError("bump radius and steepness must be positive");
        return Symbol(
            [radius, steepness](Real x, Real e) {
                const Real u = (x * x + e * e) / (radius * radius);
                return u < 1 ? Complex(std::exp(-steepness * u / (1 - u))) : Complex(0);
            },
            "compact-bump");
    }

    Symbol Symbol::multiplier(std::function<Complex(Real)> m, std::string name)
    {
        return Symbol([m = std::move(m)](Real, Real e) { return m(e); }, std::move(name));
    }

    Symbol Symbol::sampled(PhaseSpaceFunction s, std::string name)
    {
        return Symbol([s = std::move(s)](Real x, Real e) { return s.interpolate(x, e); }, std::move(name));
    }

    TamenessReport tameness_check(const PhaseSpec& phi, const TamenessRegion& region, Real delta)
    {
        const int d = phi.d;
        std::mt19937_64 rng(region.seed);
        std::uniform_real_distribution<Real> U(-region.half_width, region.half_width);
        std::vector<RVector> xs, es;
        for (int s = 0; s < region.samples; ++s)
        {
            RVector x(d), e(d);
            for (int i = 0; i < d; ++i)
                x[i] = U(rng), e[i] = U(rng);
            xs.push_back(x);
            es.push_back(e);
        }

        TamenessReport rep;
        rep.exact_derivatives = phi.exact_derivatives();
        rep.min_det = inf;
        const Real h3 = 1e-2;
        for (std::size_t s = 0; s < xs.size(); ++s)
        {
            const RMatrix H = phi.hessian(xs[s], es[s]);
            rep.max_second = std::max(rep.max_second, H.cwiseAbs().maxCoeff());
            rep.min_det = std::min(rep.min_det, std::abs(phi.hxe(xs[s], es[s]).determinant()));
            if (!phi.quadratic)
                for (int c = 0; c < 2 * d; ++c)
                {
                    RVector xp = xs[s], xm = xs[s], ep = es[s], em = es[s];
                    if (c < d)
                        xp[c] += h3, xm[c] -= h3;
                    else
                        ep[c - d] += h3, em[c - d] -= h3;
                    const RMatrix D3 = (phi.hessian(xp, ep) - phi.hessian(xm, em)) / (2 * h3);
                    rep.max_third = std::max(rep.max_third, D3.cwiseAbs().maxCoeff());
                }
        }

        auto phase3 = [&](Real scale) {
            Real sup = 0;
            for (std::size_t i = 0; i < xs.size(); ++i)
            {
                const RVector e = es[i] * scale;
                const RVector gi = phi.gx(xs[i] * scale, e);
                for (std::size_t j = 0; j < xs.size(); ++j)
                    sup = std::max(sup, (gi - phi.gx(xs[j] * scale, e)).norm());
            }
            return sup;
        };
        rep.phase3_sup = phase3(1);
        rep.phase3_sup_doubled = phase3(2);
        rep.nondegenerate = rep.min_det >= delta;
        rep.phase3_bounded = rep.phase3_sup_doubled <= 1.25 * rep.phase3_sup + 1e-6;
        return rep;
    }

    CanonicalMap::CanonicalMap(PhaseSpec phi, ChiMethod method, NewtonOptions opts)
        : phi_(std::move(phi)), method_(method), opts_(opts)
    {
        if (method_ == ChiMethod::Auto)
            method_ = phi_.quadratic ? ChiMethod::ClosedForm : ChiMethod::Newton;
        if (method_ == ChiMethod::ClosedForm && !phi_.quadratic)
            throw UnsupportedError("closed-form canonical map needs a quadratic phase");
        if (method_ == ChiMethod::Newton)
        {
            // Average mixed Hessian over a small grid in the region, used to initialize Newton.
            const int d = phi_.d;
            avg_hessian_ = RMatrix::Zero(d, d);
            const int k = 2;
            int count = 0;
            for (int a = -k; a <= k; ++a)
                for (int b = -k; b <= k; ++b)
                {
                    const RVector x = RVector::Constant(d, a * opts_.region / k);
                    const RVector e = RVector::Constant(d, b * opts_.region / k);
                    avg_hessian_ += phi_.hxe(x, e);
                    ++count;
                }
            avg_hessian_ /= count;
        }
    }

    CanonicalPoint CanonicalMap::solve(const RVector& y, const RVector& eta) const
    {
        const int d = phi_.d;
        if (y.size() != d || eta.size() != d)
            throw ShapeError("canonical map arguments must have dimension d");
        CanonicalPoint cp;
        cp.method = method_;
        if (method_ == ChiMethod::ClosedForm)
        {
            const QuadraticPhase& q = *phi_.quadratic;
            cp.x = q.B.lu().solve(y - q.C * eta + q.x0);
            cp.xi = q.A * cp.x + q.B * eta + q.eta0;
            cp.residual = (q.grad_eta(cp.x, eta) - y).norm();
            return cp;
        }

        const Real tol = opts_.tol * std::max<Real>(1, y.norm());
        std::ostringstream trace;
        auto run = [&](RVector x) -> bool {
            for (int it = 0; it <= opts_.max_iter; ++it)
            {
                const RVector F = phi_.geta(x, eta) - y;
                cp.residual = F.norm();
                trace << " " << cp.residual;
                cp.iterations = it;
                if (cp.residual <= tol)
                {
                    cp.x = x;
                    return true;
                }
                // d/dx_j of (grad_eta Phi)_i is the transpose of the mixed Hessian.
                const RMatrix J = phi_.hxe(x, eta).transpose();
                x -= J.fullPivLu().solve(F);
                if (!x.allFinite())
                    return false;
            }
            return false;
        };
        const RVector x0 = avg_hessian_.transpose().fullPivLu().solve(y - phi_.geta(RVector::Zero(d), eta));
        if (!run(x0))
        {
            trace << " | restart from y:";
            if (!run(y))
                throw ConvergenceError("canonical transform: Newton did not converge; residuals" + trace.str());
        }
        cp.xi = phi_.gx(cp.x, eta);
        return cp;
    }

    RVector CanonicalMap::operator()(const RVector& point) const
    {
        const int d = phi_.d;
        const CanonicalPoint cp = solve(point.head(d), point.tail(d));
        RVector out(2 * d);
        out << cp.x, cp.xi;
        return out;
    }

    Real CanonicalMap::lipschitz_estimate(int samples) const
    {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<Real> U(-opts_.region, opts_.region);
        const int n = 2 * phi_.d;
        Real lip = 0;
        for (int s = 0; s < samples; ++s)
        {
            RVector p(n), q(n);
            for (int i = 0; i < n; ++i)
                p[i] = U(rng), q[i] = U(rng);
            lip = std::max(lip, ((*this)(p) - (*this)(q)).norm() / (p - q).norm());
        }
        return lip;
    }

    CanonicalPoint canonical_transform(const PhaseSpec& phi, const RVector& y, const RVector& eta, ChiMethod method,
                                       const NewtonOptions& opts)
    {
        return CanonicalMap(phi, method, opts).solve(y, eta);
    }

    ChiPrime discretize_chi(const PhaseMap& chi, const TruncatedLattice& lattice, const FundamentalDomain& Q)
    {
        const int n = 2 * lattice.d();
        ChiPrime cp{lattice, Eigen::MatrixXi(n, lattice.size()), RMatrix(n, lattice.size()), 0};
        for (Eigen::Index k = 0; k < lattice.size(); ++k)
        {
            const auto [c, r] = Q.decompose(chi(lattice.point(k)));
            cp.targets.col(k) = c;
            cp.remainders.col(k) = r;
        }
        cp.fiber_bound = fiber_bound(cp.map());
        return cp;
    }

    std::vector<int> chi_prime_fiber_profile(const PhaseMap& chi, const Lattice& base, const FundamentalDomain& Q,
                                             const std::vector<Real>& radii)
    {
        std::vector<int> out;
        for (Real R : radii)
            out.push_back(discretize_chi(chi, TruncatedLattice(base, R), Q).fiber_bound);
        return out;
    }

    SampledSignal Operator::apply(const SampledSignal& f) const
    {
        if (f.d() != 1 || f.N() != N || std::abs(f.L() - L) > 1e-12 * L)
            throw ShapeError("signal does not match the operator grid");
        return SampledSignal(1, L, N, kernel * f.data());
    }

    Operator fio_operator(const Symbol& sigma, const PhaseSpec& phi, Real L, Eigen::Index N)
    {
        if (phi.d != 1)
            throw UnsupportedError("FIO quadrature is implemented for d = 1");
        Operator T{L, N, CMatrix::Zero(N, N)};
        if (sigma.is_zero())
            return T;
        const Real dx = L / static_cast<Real>(N);
        // Row j of the kernel is dx * DFT of exp(2 pi i Phi(x_j, .)) sigma(x_j, .) / L.
        parallel_for(static_cast<std::size_t>(N), [&](std::size_t jj) {
            const auto j = static_cast<Eigen::Index>(jj);
            const Real x = static_cast<Real>(j) * dx - L / 2;
            RVector xv = scalar_vec(x), ev(1);
            CVector E(N), row(N);
            for (Eigen::Index l = 0; l < N; ++l)
            {
                const Real eta = static_cast<Real>(l - N / 2) / L;
                ev[0] = eta;
                E[l] = std::polar(1.0, kTwoPi * phi.value(xv, ev)) * sigma(x, eta) / L;
            }
            fft::centered_dft(E.data(), row.data(), N);
            T.kernel.row(j) = row.transpose() * dx;
        });
        return T;
    }

    SampledSignal apply_fio(const Symbol& sigma, const PhaseSpec& phi, const SampledSignal& f)
    {
        return fio_operator(sigma, phi, f.L(), f.N()).apply(f);
    }

    LatticeMatrix gabor_matrix(const Operator& T, const GaborSystem& sys)
    {
        if (T.N != sys.N() || std::abs(T.L - sys.L()) > 1e-12 * T.L)
            throw ShapeError("operator and Gabor system live on different grids");
        const CMatrix& G = sys.atoms();
        return LatticeMatrix(sys.lattice(), (G.adjoint() * (T.kernel * G)) * sys.dx());
    }

    LatticeMatrix gabor_matrix_quadratic_stft(const Symbol& sigma, const PhaseSpec& phi, const GaborSystem& sys,
                                              const QuadraticStftOptions& opts)
    {
        if (!phi.quadratic)
            throw UnsupportedError("STFT route needs a quadratic phase; use gabor_matrix for general phases");
        if (phi.d != 1)
            throw UnsupportedError("STFT route is implemented for d = 1");
        const TruncatedLattice& lat = sys.lattice();
        LatticeMatrix out = LatticeMatrix::zero(lat);
        if (sigma.is_zero())
            return out;

        const QuadraticPhase& q = *phi.quadratic;
        const Real dx = sys.dx();
        const Real ratio = opts.step / dx;
        if (std::abs(ratio - std::round(ratio)) > 1e-9 || ratio < 1)
            throw ParameterError("patch step must be a multiple of the grid spacing");
        const auto np = static_cast<Eigen::Index>(std::llround(2 * opts.patch / opts.step));
        RVector w(np);
        for (Eigen::Index p = 0; p < np; ++p)
            w[p] = -opts.patch + static_cast<Real>(p) * opts.step;

        // Window pieces: g on grid samples, ghat by direct quadrature at the patch points.
        const SampledSignal& g = sys.window();
        CVector gw(np), ghw(np);
        for (Eigen::Index p = 0; p < np; ++p)
        {
            const auto j = static_cast<Eigen::Index>(std::llround((w[p] + sys.L() / 2) / dx));
            gw[p] = j >= 0 && j < sys.N() ? g[j] : Complex(0);
            Complex acc = 0;
            for (Eigen::Index k = 0; k < sys.N(); ++k)
                acc += g[k] * std::polar(1.0, -kTwoPi * w[p] * g.position(k));
            ghw[p] = acc * dx;
        }
        const Real a11 = q.A(0, 0), b11 = q.B(0, 0), c11 = q.C(0, 0);
        // conj(Psi(w)) = exp(2 pi i Phi_2(w)) conj(g(w1)) ghat(w2)
        CMatrix K(np, np);
        for (Eigen::Index t = 0; t < np; ++t)
            for (Eigen::Index p = 0; p < np; ++p)
            {
                const Real phi2 = 0.5 * (a11 * w[p] * w[p] + 2 * b11 * w[p] * w[t] + c11 * w[t] * w[t]);
                K(p, t) = std::polar(1.0, kTwoPi * phi2) * std::conj(gw[p]) * ghw[t];
            }

        const int kx = lat.time_index_radius(), kw = lat.freq_index_radius();
        const Real alpha = lat.base().alpha, beta = lat.base().beta;
        const Eigen::Index nt = 2 * kx + 1, nf = 2 * kw + 1;
        const Real area = opts.step * opts.step;

        parallel_for(static_cast<std::size_t>(nt * nf), [&](std::size_t task) {
            const int nmu = static_cast<int>(task / static_cast<std::size_t>(nf)) - kx;   // mu_1 index
            const int mlam = static_cast<int>(task % static_cast<std::size_t>(nf)) - kw;  // lambda_2 index
            const Real a1 = alpha * nmu, a2 = beta * mlam;
            const RVector av = scalar_vec(a1), ev = scalar_vec(a2);
            const Real gxa = q.grad_x(av, ev)[0], gea = q.grad_eta(av, ev)[0];

            CMatrix Z(np, np);
            for (Eigen::Index t = 0; t < np; ++t)
                for (Eigen::Index p = 0; p < np; ++p)
                    Z(p, t) = K(p, t) == Complex(0) ? Complex(0) : sigma(a1 + w[p], a2 + w[t]) * K(p, t);
            // b2 = lambda_1 - grad_eta Phi(a) for each lambda_1; b1 = mu_2 - grad_x Phi(a) for each mu_2.
            CMatrix E2(np, nt), E1(nf, np);
            for (Eigen::Index n = 0; n < nt; ++n)
            {
                const Real b2 = alpha * static_cast<Real>(n - kx) - gea;
                for (Eigen::Index t = 0; t < np; ++t)
                    E2(t, n) = std::polar(1.0, -kTwoPi * b2 * w[t]);
            }
            for (Eigen::Index m = 0; m < nf; ++m)
            {
                const Real b1 = beta * static_cast<Real>(m - kw) - gxa;
                for (Eigen::Index p = 0; p < np; ++p)
                    E1(m, p) = std::polar(1.0, -kTwoPi * b1 * w[p]);
            }
            const CMatrix V = E1 * (Z * E2) * area;  // V(mu_2 index, lambda_1 index)

            IVector mu(2), lam(2);
            for (Eigen::Index n = 0; n < nt; ++n)
                for (Eigen::Index m = 0; m < nf; ++m)
                {
                    mu << nmu, static_cast<int>(m - kw);
                    lam << static_cast<int>(n - kx), mlam;
                    out.entries(*lat.index_of(mu), *lat.index_of(lam)) = std::abs(V(m, n));
                }
        });
        return out;
    }

    DecayFit decay_fit(const LatticeMatrix& M, const PhaseMap& chi, Real noise_floor, Real bucket_width)
    {
        const TruncatedLattice& lat = M.lattice;
        const Eigen::Index n = lat.size();
        std::vector<RVector> img(static_cast<std::size_t>(n));
        std::vector<RVector> pts(static_cast<std::size_t>(n));
        for (Eigen::Index k = 0; k < n; ++k)
        {
            pts[static_cast<std::size_t>(k)] = lat.point(k);
            img[static_cast<std::size_t>(k)] = chi(pts[static_cast<std::size_t>(k)]);
        }

        std::vector<Real> xs, ys, dist;
        DecayFit fit;
        for (Eigen::Index l = 0; l < n; ++l)
            for (Eigen::Index m = 0; m < n; ++m)
            {
                const Real a = std::abs(M.entries(m, l));
                if (!(a > noise_floor))
                    continue;
                const Real d = (img[static_cast<std::size_t>(l)] - pts[static_cast<std::size_t>(m)]).norm();
                xs.push_back(0.5 * std::log1p(d * d));
                ys.push_back(std::log(a));
                dist.push_back(d);
                const auto b = static_cast<std::size_t>(d / bucket_width);
                if (b >= fit.envelope.size())
                    fit.envelope.resize(b + 1, 0);
                fit.envelope[b] = std::max(fit.envelope[b], a);
            }
        if (xs.size() < 10)
            throw InsufficientDataError("decay fit needs at least 10 entries above the noise floor");

        // y = c - s x by least squares.
        const auto cnt = static_cast<Real>(xs.size());
        Real mx = 0, my = 0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            mx += xs[i], my += ys[i];
        mx /= cnt;
        my /= cnt;
        Real sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i)
        {
            sxx += (xs[i] - mx) * (xs[i] - mx);
            sxy += (xs[i] - mx) * (ys[i] - my);
        }
        if (!(sxx > 0))
            throw InsufficientDataError("decay fit needs entries at more than one distance");
        fit.s = -sxy / sxx;
        fit.log_C_ls = my + fit.s * mx;
        Real res = 0;
        for (std::size_t i = 0; i < xs.size(); ++i)
        {
            const Real e = ys[i] - (fit.log_C_ls - fit.s * xs[i]);
            res += e * e;
            fit.C = std::max(fit.C, std::exp(ys[i] + fit.s * xs[i]));
        }
        fit.residual_rms = std::sqrt(res / cnt);
        fit.used = static_cast<Eigen::Index>(xs.size());

        fit.bucket_lo.resize(fit.envelope.size());
        fit.envelope_monotone = true;
        Real prev = inf;
        for (std::size_t b = 0; b < fit.envelope.size(); ++b)
        {
            fit.bucket_lo[b] = static_cast<Real>(b) * bucket_width;
            if (fit.envelope[b] == 0)
                continue;
            if (fit.envelope[b] > prev * (1 + 1e-9))
                fit.envelope_monotone = false;
            prev = fit.envelope[b];
        }
        return fit;
    }
}  // namespace tflab
