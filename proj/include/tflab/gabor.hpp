#pragma once

#include "tflab/lattice.hpp"
#include "tflab/signal.hpp"
#include "tflab/types.hpp"

namespace tflab
{
    /// Gabor system { pi(lambda) g : lambda in Lambda_R } with on-grid lattice steps.
    class GaborSystem
    {
    public:
        GaborSystem(SampledSignal window, TruncatedLattice lattice);

        const SampledSignal& window() const noexcept { return window_; }
        const TruncatedLattice& lattice() const noexcept { return lattice_; }
        Real L() const noexcept { return window_.L(); }
        Eigen::Index N() const noexcept { return window_.N(); }
        Real dx() const noexcept { return window_.dx(); }

        /// N x |Lambda_R| matrix whose columns are the atoms pi(lambda) g.
        const CMatrix& atoms() const noexcept { return atoms_; }
        SampledSignal atom(Eigen::Index k) const;

        /// Same lattice, different window.
        GaborSystem with_window(SampledSignal window) const;

    private:
        SampledSignal window_;
        TruncatedLattice lattice_;
        CMatrix atoms_;
    };

    /// c_lambda = <f, pi(lambda) g>.
    CVector analysis(const GaborSystem& sys, const SampledSignal& f);
    /// sum_lambda c_lambda pi(lambda) g.
    SampledSignal synthesis(const GaborSystem& sys, const CVector& c);
    /// S f = synthesis(analysis(f)).
    SampledSignal frame_apply(const GaborSystem& sys, const SampledSignal& f);
    /// Dense frame operator on the grid, dx * G G^H.
    CMatrix frame_matrix(const GaborSystem& sys);

    struct FrameBoundOptions
    {
        Real margin = 3.5;       ///< probe space keeps this far from the truncation edge (clamped at 0)
        Real probe_step = 0.5;   ///< spacing of the Gaussian probes spanning the subspace
        Real rank_cutoff = 1e-9; ///< relative cutoff when orthonormalizing the probes
    };

    struct FrameBounds
    {
        Real A = 0;
        Real B = 0;
        Eigen::Index probe_dim = 0;
        Real ratio() const noexcept { return B / A; }
        bool tight(Real tol = 1e-6) const noexcept { return B / A - 1 <= tol; }
    };

    /// Extreme Rayleigh quotients of S over signals localized in the interior of the
    /// truncation (span of Gaussian probes at |lambda|_inf <= R - margin). The truncated
    /// frame operator is singular for signals near the box edge, so the full-grid
    /// spectrum says nothing about the frame. Throws NotAFrameError if A < 1e-10 B.
    FrameBounds frame_bounds(const GaborSystem& sys, const FrameBoundOptions& opts = {});

    struct SolveReport
    {
        int iterations = 0;
        Real residual = 0;  ///< relative residual ||S h - g|| / ||g||
    };

    /// Canonical dual window h = S^{-1} g by conjugate gradients. When the lattice tiles
    /// the periodic grid, S is the frame operator of that whole lattice (it commutes
    /// with every lattice shift); otherwise the truncated operator is used.
    SampledSignal dual_window(const GaborSystem& sys, SolveReport* report = nullptr, Real tol = 1e-10, int max_iter = 5000);

    /// g_t = S^{-1/2} g by eigendecomposition, S as for dual_window (eigenvalues
    /// below 1e-10 * max are dropped).
    SampledSignal tight_window(const GaborSystem& sys);

    /// Share of the coefficient energy of f in the outermost lattice shell
    /// (|lambda|_inf > R - 1).
    Real tail_indicator(const GaborSystem& sys, const SampledSignal& f);
}  // namespace tflab
