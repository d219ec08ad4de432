#include "tflab/gabor.hpp"

#include <cmath>
#include <optional>

#include <Eigen/Eigenvalues>

namespace tflab
{
    namespace
    {
        bool on_grid(Real step, Real unit)
        {
            const Real r = step / unit;
            return std::abs(r - std::round(r)) <= 1e-9 * std::max<Real>(1, r);
        }

        /// Frame operator of the whole lattice that tiles the periodic grid, when it
        /// does (alpha | L and beta | N / L). Walnut form: the frequency sum collapses
        /// to a comb, S(j, k) = dx Q sum_n g_n(j) conj(g_n(k)) for j = k mod Q.
        std::optional<CMatrix> periodic_frame_operator(const GaborSystem& sys)
        {
            const Lattice& b = sys.lattice().base();
            const Real P = sys.L() / b.alpha, Q = static_cast<Real>(sys.N()) / sys.L() / b.beta;
            if (std::abs(P - std::round(P)) > 1e-9 || std::abs(Q - std::round(Q)) > 1e-9)
                return std::nullopt;
            const auto np = static_cast<Eigen::Index>(std::round(P)), nq = static_cast<Eigen::Index>(std::round(Q));
            const Eigen::Index N = sys.N(), step = static_cast<Eigen::Index>(std::round(b.alpha / sys.dx()));
            const CVector& g = sys.window().data();
            CMatrix S = CMatrix::Zero(N, N);
            for (Eigen::Index n = 0; n < np; ++n)
                for (Eigen::Index j = 0; j < N; ++j)
                {
                    const Complex gj = g[((j - n * step) % N + N) % N];
                    if (gj == Complex(0))
                        continue;
                    for (Eigen::Index k = j % nq; k < N; k += nq)
                        S(j, k) += gj * std::conj(g[((k - n * step) % N + N) % N]);
                }
            return S * (sys.dx() * static_cast<Real>(nq));
        }

        CMatrix dual_frame_operator(const GaborSystem& sys)
        {
            if (auto S = periodic_frame_operator(sys))
                return *S;
            return frame_matrix(sys);
        }
    }  // namespace

    GaborSystem::GaborSystem(SampledSignal window, TruncatedLattice lattice)
        : window_(std::move(window)), lattice_(std::move(lattice))
    {
        if (window_.d() != 1 || lattice_.d() != 1)
            throw UnsupportedError("Gabor systems are implemented for d = 1");
        if (!(window_.norm() > 0))
            throw ParameterError("window must be nonzero");
        const Lattice& b = lattice_.base();
        if (!on_grid(b.alpha, window_.dx()) || !on_grid(b.beta, 1 / window_.L()))
            throw ParameterError("lattice steps must be multiples of the grid spacings");
        atoms_.resize(window_.N(), lattice_.size());
        for (Eigen::Index k = 0; k < lattice_.size(); ++k)
        {
            const RVector p = lattice_.point(k);
            atoms_.col(k) = tf_shift(window_, p[0], p[1]).data();
        }
    }

    SampledSignal GaborSystem::atom(Eigen::Index k) const { return SampledSignal(1, L(), N(), atoms_.col(k)); }

    GaborSystem GaborSystem::with_window(SampledSignal window) const
    {
        window.require_same_grid(window_);
        return GaborSystem(std::move(window), lattice_);
    }

    CVector analysis(const GaborSystem& sys, const SampledSignal& f)
    {
        f.require_same_grid(sys.window());
        return sys.atoms().adjoint() * f.data() * sys.dx();
    }

    SampledSignal synthesis(const GaborSystem& sys, const CVector& c)
    {
        if (c.size() != sys.lattice().size())
            throw ShapeError("coefficient sequence does not match the lattice");
        return SampledSignal(1, sys.L(), sys.N(), sys.atoms() * c);
    }

    SampledSignal frame_apply(const GaborSystem& sys, const SampledSignal& f) { return synthesis(sys, analysis(sys, f)); }

    CMatrix frame_matrix(const GaborSystem& sys) { return sys.atoms() * sys.atoms().adjoint() * sys.dx(); }

    FrameBounds frame_bounds(const GaborSystem& sys, const FrameBoundOptions& opts)
    {
        if (!(opts.margin >= 0) || !(opts.probe_step > 0))
            throw ParameterError("frame_bounds: bad probe options");
        const Real reach = std::max<Real>(sys.lattice().radius() - opts.margin, 0);
        const auto kp = static_cast<int>(std::floor(reach / opts.probe_step + 1e-12));
        const SampledSignal probe = gaussian_window(sys.L(), sys.N());
        CMatrix P(sys.N(), (2 * kp + 1) * (2 * kp + 1));
        Eigen::Index c = 0;
        for (int n = -kp; n <= kp; ++n)
            for (int m = -kp; m <= kp; ++m)
                P.col(c++) = tf_shift(probe, n * opts.probe_step, m * opts.probe_step).data();

        // Orthonormal basis Q of span(P) from the Gram matrix.
        Eigen::SelfAdjointEigenSolver<CMatrix> gram(P.adjoint() * P);
        const RVector& ev = gram.eigenvalues();
        const Real top = ev.maxCoeff();
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            if (ev[i] > opts.rank_cutoff * top)
                keep.push_back(i);
        CMatrix Q(sys.N(), static_cast<Eigen::Index>(keep.size()));
        for (std::size_t i = 0; i < keep.size(); ++i)
            Q.col(static_cast<Eigen::Index>(i)) = P * gram.eigenvectors().col(keep[i]) / std::sqrt(ev[keep[i]]);

        // Rayleigh quotients <S f, f> / ||f||^2 with ||f||^2 = dx |f|^2; S = dx G G^H.
        const CMatrix GQ = sys.atoms().adjoint() * Q;
        const CMatrix compressed = GQ.adjoint() * GQ * sys.dx();
        Eigen::SelfAdjointEigenSolver<CMatrix> es(compressed, Eigen::EigenvaluesOnly);
        FrameBounds fb;
        fb.A = es.eigenvalues().minCoeff();
        fb.B = es.eigenvalues().maxCoeff();
        fb.probe_dim = Q.cols();
        if (!(fb.A > 1e-10 * fb.B))
            throw NotAFrameError("not a frame at this truncation: A = " + std::to_string(fb.A) +
                                 ", B = " + std::to_string(fb.B));
        return fb;
    }

    SampledSignal dual_window(const GaborSystem& sys, SolveReport* report, Real tol, int max_iter)
    {
        const CMatrix Sm = dual_frame_operator(sys);
        auto S = [&](const CVector& v) -> CVector { return Sm * v; };
        const CVector& g = sys.window().data();
        const Real gnorm = g.norm();

        CVector h = CVector::Zero(g.size());
        CVector r = g, p = r;
        Real rr = r.squaredNorm();
        int it = 0;
        Real best = std::sqrt(rr) / gnorm;
        int since_best = 0;
        while (std::sqrt(rr) > tol * gnorm && it < max_iter)
        {
            const CVector Sp = S(p);
            const Complex alpha = rr / p.dot(Sp);
            h += alpha * p;
            // Recompute the true residual now and then to keep rounding from accumulating.
            if (++it % 50 == 0)
                r = g - S(h);
            else
                r -= alpha * Sp;
            const Real rr_new = r.squaredNorm();
            p = r + (rr_new / rr) * p;
            rr = rr_new;
            const Real rel = std::sqrt(rr) / gnorm;
            if (rel < 0.5 * best)
            {
                best = rel;
                since_best = 0;
            }
            else if (++since_best > 1000)
                break;
        }
        const Real residual = (g - S(h)).norm() / gnorm;
        if (report)
            *report = {it, residual};
        if (!(residual <= tol))
        {
            FrameBounds fb;
            try
            {
                fb = frame_bounds(sys);
            }
            catch (const NotAFrameError&)
            {
            }
            throw ConvergenceError("dual window CG stalled at residual " + std::to_string(residual) + " after " +
                                   std::to_string(it) + " iterations (A = " + std::to_string(fb.A) +
                                   ", B = " + std::to_string(fb.B) + ")");
        }
        return SampledSignal(1, sys.L(), sys.N(), h);
    }

    SampledSignal tight_window(const GaborSystem& sys)
    {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(dual_frame_operator(sys));
        const RVector& ev = es.eigenvalues();
        const Real cut = 1e-10 * ev.maxCoeff();
        RVector inv_sqrt(ev.size());
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            inv_sqrt[i] = ev[i] > cut ? 1 / std::sqrt(ev[i]) : 0;
        const CMatrix& U = es.eigenvectors();
        const CVector gt = U * (inv_sqrt.asDiagonal() * (U.adjoint() * sys.window().data()));
        return SampledSignal(1, sys.L(), sys.N(), gt);
    }

    Real tail_indicator(const GaborSystem& sys, const SampledSignal& f)
    {
        const CVector c = analysis(sys, f);
        const TruncatedLattice& lat = sys.lattice();
        const int kx = lat.time_index_radius(), kw = lat.freq_index_radius();
        Real total = 0, shell = 0;
        for (Eigen::Index k = 0; k < lat.size(); ++k)
        {
            const Real e = std::norm(c[k]);
            total += e;
            const auto co = lat.coords(k);
            // Outermost unit of phase space along either axis.
            const Real px = std::abs(co[0]) * lat.base().alpha, pw = std::abs(co[1]) * lat.base().beta;
            if (px > kx * lat.base().alpha - 1 + 1e-12 || pw > kw * lat.base().beta - 1 + 1e-12)
                shell += e;
        }
        return total > 0 ? shell / total : 0;
    }
}  // namespace tflab
