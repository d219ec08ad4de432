#include "tflab/lattice.hpp"

#include <set>

namespace tflab
{
    Lattice::Lattice(Real alpha_, Real beta_, int d_) : alpha(alpha_), beta(beta_), d(d_)
    {
        if (!(alpha > 0) || !(beta > 0))
            throw ParameterError("lattice steps must be positive");
        if (d < 1)
            throw ParameterError("lattice dimension must be >= 1");
    }

    RVector Lattice::point(const IVector& c) const
    {
        RVector p(2 * d);
        for (int i = 0; i < d; ++i)
        {
            p[i] = alpha * c[i];
            p[d + i] = beta * c[d + i];
        }
        return p;
    }

    std::optional<IVector> Lattice::coords_of(const RVector& p, Real tol) const
    {
        if (p.size() != 2 * d)
            throw ShapeError("point dimension does not match lattice");
        IVector c(2 * d);
        for (int i = 0; i < 2 * d; ++i)
        {
            const Real step = i < d ? alpha : beta;
            const Real r = p[i] / step;
            const Real n = std::round(r);
            if (std::abs(r - n) > tol)
                return std::nullopt;
            c[i] = static_cast<int>(n);
        }
        return c;
    }

    FundamentalDomain::FundamentalDomain(Lattice lattice, BoxBoundary boundary)
        : lattice_(lattice), boundary_(boundary)
    {
    }

    bool FundamentalDomain::contains(const RVector& q) const
    {
        const int d = lattice_.d;
        for (int i = 0; i < 2 * d; ++i)
        {
            const Real h = (i < d ? lattice_.alpha : lattice_.beta) / 2;
            if (boundary_ == BoxBoundary::LowerClosed ? (q[i] < -h || q[i] >= h) : (q[i] <= -h || q[i] > h))
                return false;
        }
        return true;
    }

    std::pair<IVector, RVector> FundamentalDomain::decompose(const RVector& p) const
    {
        const int d = lattice_.d;
        if (p.size() != 2 * d)
            throw ShapeError("point dimension does not match lattice");
        IVector c(2 * d);
        RVector q(2 * d);
        for (int i = 0; i < 2 * d; ++i)
        {
            const Real step = i < d ? lattice_.alpha : lattice_.beta;
            const Real t = p[i] / step;
            // lower-closed: n = floor(t + 1/2); upper-closed: n = ceil(t - 1/2)
            Real n = boundary_ == BoxBoundary::LowerClosed ? std::floor(t + 0.5) : std::ceil(t - 0.5);
            c[i] = static_cast<int>(n);
            q[i] = p[i] - n * step;
        }
        return {c, q};
    }

    Real FundamentalDomain::half_diameter() const
    {
        const int d = lattice_.d;
        return 0.5 * std::sqrt(d * (lattice_.alpha * lattice_.alpha + lattice_.beta * lattice_.beta));
    }

    TruncatedLattice::TruncatedLattice(Lattice base, Real radius) : base_(base), radius_(radius)
    {
        if (!(radius > 0))
            throw ParameterError("truncation radius must be positive");
        if (!(base.alpha > 0) || !(base.beta > 0) || base.d < 1)
            throw ParameterError("invalid lattice");
        kx_ = static_cast<int>(std::floor(radius / base.alpha + 1e-12));
        kw_ = static_cast<int>(std::floor(radius / base.beta + 1e-12));
        const int d = base.d;
        time_count_ = 1;
        freq_count_ = 1;
        for (int i = 0; i < d; ++i)
        {
            time_count_ *= 2 * kx_ + 1;
            freq_count_ *= 2 * kw_ + 1;
        }
        const Eigen::Index total = time_count_ * freq_count_;
        coords_.resize(2 * d, total);
        // Mixed-radix counter; first coordinate is the most significant digit.
        IVector c(2 * d);
        for (int i = 0; i < 2 * d; ++i)
            c[i] = -(i < d ? kx_ : kw_);
        for (Eigen::Index k = 0; k < total; ++k)
        {
            coords_.col(k) = c;
            for (int i = 2 * d - 1; i >= 0; --i)
            {
                const int lim = i < d ? kx_ : kw_;
                if (c[i] < lim)
                {
                    ++c[i];
                    break;
                }
                c[i] = -lim;
            }
        }
    }

    RVector TruncatedLattice::point(Eigen::Index k) const { return base_.point(coords_.col(k)); }

    std::optional<Eigen::Index> TruncatedLattice::index_of(const IVector& c) const
    {
        const int d = base_.d;
        if (c.size() != 2 * d)
            return std::nullopt;
        Eigen::Index idx = 0;
        for (int i = 0; i < 2 * d; ++i)
        {
            const int lim = i < d ? kx_ : kw_;
            if (c[i] < -lim || c[i] > lim)
                return std::nullopt;
            idx = idx * (2 * lim + 1) + (c[i] + lim);
        }
        return idx;
    }

    Eigen::Index TruncatedLattice::origin_index() const { return *index_of(IVector::Zero(2 * base_.d)); }

    TruncatedLattice build_lattice(Real alpha, Real beta, int d, Real radius)
    {
        return TruncatedLattice(Lattice(alpha, beta, d), radius);
    }

    LatticeMap::LatticeMap(TruncatedLattice lattice, Eigen::MatrixXi targets)
        : lattice_(std::move(lattice)), targets_(std::move(targets))
    {
        if (targets_.rows() != lattice_.all_coords().rows() || targets_.cols() != lattice_.size())
            throw ShapeError("lattice map table must cover the truncation");
        for (Eigen::Index k = 0; k < targets_.cols(); ++k)
            ++fibers_[IVector(targets_.col(k))];
    }

    LatticeMap LatticeMap::identity(const TruncatedLattice& lattice)
    {
        return LatticeMap(lattice, lattice.all_coords());
    }

    int fiber_bound(const LatticeMap& psi)
    {
        int m = 0;
        for (const auto& [target, count] : psi.fibers())
            m = std::max(m, count);
        return m;
    }

    std::vector<std::vector<Eigen::Index>> partition_injective(const LatticeMap& psi)
    {
        // The k-th preimage of a target goes to class k; class count = fiber bound.
        std::map<IVector, int, CoordLess> seen;
        std::vector<std::vector<Eigen::Index>> classes;
        for (Eigen::Index k = 0; k < psi.lattice().size(); ++k)
        {
            const int c = seen[IVector(psi.target(k))]++;
            if (c >= static_cast<int>(classes.size()))
                classes.resize(c + 1);
            classes[c].push_back(k);
        }
        return classes;
    }

    const AdmissibilityReport& AdmissibilityReport::require() const
    {
        if (!accepted)
            throw NotAdmissibleError("not admissible at this truncation: " + reason);
        return *this;
    }

    AdmissibilityReport admissibility_decompose(const LatticeMap& psi, const AdmissibilityOptions& opts)
    {
        const auto& lat = psi.lattice();
        const int d = lat.d();
        AdmissibilityReport rep;
        rep.offsets.resize(d, lat.size());

        // Enumeration is time-major, so the first point seen with a given
        // frequency index has the least time index.
        for (Eigen::Index k = 0; k < lat.size(); ++k)
        {
            IVector j = lat.coords(k).tail(d);
            IVector psi2 = psi.target(k).tail(d);
            auto it = rep.reduced.find(j);
            if (it == rep.reduced.end())
                it = rep.reduced.emplace(j, psi2).first;
            rep.offsets.col(k) = psi2 - it->second;
        }

        std::set<IVector, CoordLess> k_set;
        for (Eigen::Index k = 0; k < lat.size(); ++k)
            k_set.insert(IVector(rep.offsets.col(k)));
        rep.offset_set.assign(k_set.begin(), k_set.end());

        std::map<IVector, int, CoordLess> reduced_fibers;
        for (const auto& [j, target] : rep.reduced)
            ++reduced_fibers[target];
        for (const auto& [t, c] : reduced_fibers)
            rep.fiber_bound_reduced = std::max(rep.fiber_bound_reduced, c);
        rep.fiber_bound_psi = fiber_bound(psi);
        rep.M = std::max(rep.fiber_bound_psi, rep.fiber_bound_reduced);
        rep.M1 = static_cast<int>(rep.offset_set.size()) * rep.M;

        if (rep.offset_set.size() > opts.offset_cap)
            rep.reason = "offset set has " + std::to_string(rep.offset_set.size()) + " elements (cap " +
                         std::to_string(opts.offset_cap) + ")";
        else if (rep.fiber_bound_reduced > opts.fiber_cap)
            rep.reason = "reduced map fiber bound " + std::to_string(rep.fiber_bound_reduced) + " exceeds cap";
        else
            rep.accepted = true;
        return rep;
    }

    TranslateResult translate_seq(const TruncatedLattice& lattice, const CVector& x, const IVector& gamma)
    {
        if (x.size() != lattice.size())
            throw ShapeError("sequence length does not match lattice");
        if (gamma.size() != 2 * lattice.d())
            throw ParameterError("translation must be a lattice vector of matching dimension");
        TranslateResult r;
        r.values = CVector::Zero(lattice.size());
        for (Eigen::Index k = 0; k < lattice.size(); ++k)
        {
            const IVector dst = lattice.coords(k) + gamma;
            if (auto idx = lattice.index_of(dst))
                r.values[*idx] = x[k];
            else if (x[k] != Complex(0))
                ++r.lost;
        }
        return r;
    }

    TranslateResult translate_seq(const TruncatedLattice& lattice, const CVector& x, const RVector& gamma)
    {
        auto c = lattice.base().coords_of(gamma);
        if (!c)
            throw ParameterError("translation is not a lattice point");
        return translate_seq(lattice, x, *c);
    }

    CMatrix to_mixed_table(const TruncatedLattice& lattice, const CVector& x)
    {
        if (x.size() != lattice.size())
            throw ShapeError("sequence length does not match lattice");
        using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        return Eigen::Map<const RowMajor>(x.data(), lattice.time_count(), lattice.freq_count());
    }

    Real lattice_lpq_norm(const TruncatedLattice& lattice, const CVector& x, Real p, Real q, const RVector& m)
    {
        if (m.size() != lattice.size())
            throw ShapeError("weight table length does not match lattice");
        using RowMajor = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        const RMatrix mt = Eigen::Map<const RowMajor>(m.data(), lattice.time_count(), lattice.freq_count());
        return lpq_norm(to_mixed_table(lattice, x), p, q, mt);
    }
}  // namespace tflab
