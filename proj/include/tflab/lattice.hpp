#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tflab/types.hpp"

namespace tflab
{
    /// Lexicographic order on integer coordinate vectors, for use as map keys.
    struct CoordLess
    {
        bool operator()(const IVector& a, const IVector& b) const noexcept
        {
            if (a.size() != b.size())
                return a.size() < b.size();
            for (Eigen::Index i = 0; i < a.size(); ++i)
                if (a[i] != b[i])
                    return a[i] < b[i];
            return false;
        }
    };

    /// Regular lattice alpha Z^d x beta Z^d. Points are addressed by integer
    /// coordinates (n_1..n_d, m_1..m_d) and sit at (alpha n, beta m).
    struct Lattice
    {
        Real alpha = 1;
        Real beta = 1;
        int d = 1;

        Lattice() = default;
        Lattice(Real alpha_, Real beta_, int d_);

        int ambient_dim() const noexcept { return 2 * d; }
        RVector point(const IVector& coords) const;
        /// Integer coordinates of `p` if it is a lattice point (to `tol` in units of the steps).
        std::optional<IVector> coords_of(const RVector& p, Real tol = 1e-9) const;
    };

    /// Which side of the half-open fundamental box is closed.
    enum class BoxBoundary
    {
        LowerClosed,  ///< Q = [-alpha/2, alpha/2) x [-beta/2, beta/2)
        UpperClosed   ///< Q = (-alpha/2, alpha/2] x (-beta/2, beta/2]
    };

    /// Half-open centered box Q attached to a lattice. Every point decomposes
    /// uniquely as q + lambda with q in Q, lambda in the lattice.
    class FundamentalDomain
    {
    public:
        explicit FundamentalDomain(Lattice lattice, BoxBoundary boundary = BoxBoundary::LowerClosed);

        const Lattice& lattice() const noexcept { return lattice_; }
        BoxBoundary boundary() const noexcept { return boundary_; }

        bool contains(const RVector& q) const;
        /// Returns (integer coordinates of lambda, remainder q).
        std::pair<IVector, RVector> decompose(const RVector& p) const;
        /// Half diameter of Q in the Euclidean norm.
        Real half_diameter() const;

    private:
        Lattice lattice_;
        BoxBoundary boundary_;
    };

    /// Finite section Lambda_R = { lambda : |lambda|_inf <= R } in lexicographic
    /// order of its integer coordinates.
    class TruncatedLattice
    {
    public:
        TruncatedLattice(Lattice base, Real radius);

        const Lattice& base() const noexcept { return base_; }
        Real radius() const noexcept { return radius_; }
        int d() const noexcept { return base_.d; }
        int time_index_radius() const noexcept { return kx_; }
        int freq_index_radius() const noexcept { return kw_; }
        Eigen::Index size() const noexcept { return coords_.cols(); }

        /// Integer coordinates of the k-th point (column view, length 2d).
        auto coords(Eigen::Index k) const { return coords_.col(k); }
        const Eigen::MatrixXi& all_coords() const noexcept { return coords_; }
        RVector point(Eigen::Index k) const;
        std::optional<Eigen::Index> index_of(const IVector& coords) const;
        Eigen::Index origin_index() const;

        /// Number of time (resp. frequency) multi-indices; a sequence on the lattice
        /// reshapes to a (time x freq) table in row-major order.
        Eigen::Index time_count() const noexcept { return time_count_; }
        Eigen::Index freq_count() const noexcept { return freq_count_; }

    private:
        Lattice base_;
        Real radius_;
        int kx_ = 0;
        int kw_ = 0;
        Eigen::Index time_count_ = 1;
        Eigen::Index freq_count_ = 1;
        Eigen::MatrixXi coords_;
    };

    TruncatedLattice build_lattice(Real alpha, Real beta, int d, Real radius);

    /// Lattice self-map psi given as a table over Lambda_R. Targets are integer
    /// coordinates in the full lattice and may leave the truncation.
    class LatticeMap
    {
    public:
        LatticeMap(TruncatedLattice lattice, Eigen::MatrixXi targets);

        static LatticeMap identity(const TruncatedLattice& lattice);
        /// Map defined by an integer-coordinate function.
        template <class F>
        static LatticeMap from_function(const TruncatedLattice& lattice, F&& f)
        {
            Eigen::MatrixXi t(lattice.all_coords().rows(), lattice.size());
            for (Eigen::Index k = 0; k < lattice.size(); ++k)
                t.col(k) = f(IVector(lattice.coords(k)));
            return LatticeMap(lattice, std::move(t));
        }

        const TruncatedLattice& lattice() const noexcept { return lattice_; }
        auto target(Eigen::Index k) const { return targets_.col(k); }
        const Eigen::MatrixXi& targets() const noexcept { return targets_; }
        RVector target_point(Eigen::Index k) const { return lattice_.base().point(targets_.col(k)); }

        /// Preimage count of every attained target.
        const std::map<IVector, int, CoordLess>& fibers() const noexcept { return fibers_; }

    private:
        TruncatedLattice lattice_;
        Eigen::MatrixXi targets_;
        std::map<IVector, int, CoordLess> fibers_;
    };

    /// Maximal fiber cardinality M of psi over the truncation.
    int fiber_bound(const LatticeMap& psi);

    /// Greedy split of Lambda_R into at most M classes with psi injective on each.
    std::vector<std::vector<Eigen::Index>> partition_injective(const LatticeMap& psi);

    struct AdmissibilityOptions
    {
        std::size_t offset_cap = 9;  ///< largest accepted |K|
        int fiber_cap = 64;          ///< largest accepted fiber bound of the reduced map
    };

    /// Split psi_2(i, j) = reduced(j) + offset(i, j) with offsets in a finite set K.
    struct AdmissibilityReport
    {
        bool accepted = false;
        std::string reason;
        std::map<IVector, IVector, CoordLess> reduced;  ///< j -> reduced psi_2(j) (frequency coords)
        Eigen::MatrixXi offsets;                        ///< d x |Lambda_R|, offset per point
        std::vector<IVector> offset_set;                ///< K, sorted
        int fiber_bound_psi = 0;
        int fiber_bound_reduced = 0;
        int M = 0;   ///< max of both fiber bounds
        int M1 = 0;  ///< |K| * M

        /// Throws NotAdmissibleError when not accepted.
        const AdmissibilityReport& require() const;
    };

    AdmissibilityReport admissibility_decompose(const LatticeMap& psi, const AdmissibilityOptions& opts = {});

    /// Result of translating a truncated sequence; `lost` counts nonzero entries
    /// that left the truncation.
    struct TranslateResult
    {
        CVector values;
        Eigen::Index lost = 0;
    };

    /// (T_gamma x)_lambda = x_{lambda - gamma}; reads outside Lambda_R are zero.
    TranslateResult translate_seq(const TruncatedLattice& lattice, const CVector& x, const IVector& gamma);
    /// Same, with gamma given as a point; throws ParameterError if it is not a lattice point.
    TranslateResult translate_seq(const TruncatedLattice& lattice, const CVector& x, const RVector& gamma);

    /// Reshape a lattice sequence into its (time index) x (frequency index) table.
    CMatrix to_mixed_table(const TruncatedLattice& lattice, const CVector& x);

    namespace detail
    {
        inline Real lp_accumulate(Real acc, Real value, Real p)
        {
            return std::isinf(p) ? std::max(acc, value) : acc + std::pow(value, p);
        }
        inline Real lp_finish(Real acc, Real p) { return std::isinf(p) ? acc : std::pow(acc, 1 / p); }
        inline void check_exponent(Real p)
        {
            if (!(p >= 1))
                throw ParameterError("mixed-norm exponent must lie in [1, inf]");
        }
    }  // namespace detail

    /// Weighted mixed norm ( sum_j ( sum_i |x_ij m_ij|^p )^{q/p} )^{1/q}; rows of
    /// `x` are the inner index i, columns the outer index j. p, q = inf use sup.
    template <class DerivedX, class DerivedM>
    Real lpq_norm(const Eigen::MatrixBase<DerivedX>& x, Real p, Real q, const Eigen::MatrixBase<DerivedM>& m)
    {
        detail::check_exponent(p);
        detail::check_exponent(q);
        if (x.rows() != m.rows() || x.cols() != m.cols())
            throw ShapeError("lpq_norm: weight table shape mismatch");
        Real outer = 0;
        for (Eigen::Index j = 0; j < x.cols(); ++j)
        {
            Real inner = 0;
            for (Eigen::Index i = 0; i < x.rows(); ++i)
                inner = detail::lp_accumulate(inner, std::abs(x(i, j)) * std::abs(m(i, j)), p);
            outer = detail::lp_accumulate(outer, detail::lp_finish(inner, p), q);
        }
        return detail::lp_finish(outer, q);
    }

    template <class DerivedX>
    Real lpq_norm(const Eigen::MatrixBase<DerivedX>& x, Real p, Real q)
    {
        return lpq_norm(x, p, q, RMatrix::Ones(x.rows(), x.cols()));
    }

    /// Weighted l^p norm of a flat sequence.
    template <class DerivedX, class DerivedM>
    Real lp_norm(const Eigen::MatrixBase<DerivedX>& x, Real p, const Eigen::MatrixBase<DerivedM>& m)
    {
        detail::check_exponent(p);
        Real acc = 0;
        for (Eigen::Index i = 0; i < x.size(); ++i)
            acc = detail::lp_accumulate(acc, std::abs(x(i)) * std::abs(m(i)), p);
        return detail::lp_finish(acc, p);
    }

    /// l^{p,q}_m norm of a lattice sequence: inner index = time coordinates,
    /// outer index = frequency coordinates. `m` is given per lattice point.
    Real lattice_lpq_norm(const TruncatedLattice& lattice, const CVector& x, Real p, Real q, const RVector& m);
}  // namespace tflab
