#include "tflab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tflab
{
    WeightSpec WeightSpec::polynomial(Real s)
    {
        if (!(s >= 0))
            throw ParameterError("polynomial weight exponent must be nonnegative");
        WeightSpec w;
        w.kind = Kind::Polynomial;
        w.s = s;
        w.name = "v_" + std::to_string(s);
        return w;
    }

    WeightSpec WeightSpec::constant() { return WeightSpec{}; }

    WeightSpec WeightSpec::tabulated(WeightFn f, std::string name)
    {
        if (!f)
            throw ParameterError("tabulated weight needs an evaluator");
        WeightSpec w;
        w.kind = Kind::Tabulated;
        w.table = std::move(f);
        w.name = std::move(name);
        return w;
    }

    Real WeightSpec::operator()(const RVector& r) const
    {
        switch (kind)
        {
        case Kind::Polynomial:
            return std::pow(1 + r.squaredNorm(), s / 2);
        case Kind::Constant:
            return 1;
        case Kind::Tabulated:
            break;
        }
        const Real v = table(r);
        if (!(v > 0))
            throw DomainError("weight must be positive");
        return v;
    }

    Real weight_eval(const WeightSpec& w, const RVector& r) { return w(r); }

    Real polynomial_moderate_constant(Real t, Real s)
    {
        if (!(t >= 0) || t > s)
            throw ParameterError("need 0 <= t <= s");
        return std::pow(4.0 / 3.0, t / 2);
    }

    Real moderate_constant(const WeightSpec& m, const WeightSpec& v)
    {
        if (m.kind == WeightSpec::Kind::Constant)
            return 1;
        if (m.kind == WeightSpec::Kind::Polynomial && v.kind == WeightSpec::Kind::Polynomial)
            return polynomial_moderate_constant(m.s, v.s);
        throw UnsupportedError("no closed-form moderate constant for " + m.name + " against " + v.name);
    }

    ModerateEstimate moderate_constant_estimate(const WeightFn& m, const WeightSpec& v, const std::vector<RVector>& sample)
    {
        if (sample.empty())
            throw ParameterError("moderate_constant_estimate: empty sample");
        const std::size_t n = sample.size();
        std::vector<Real> mv(n), vv(n), radius(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            mv[i] = m(sample[i]);
            if (!(mv[i] > 0))
                throw DomainError("moderate weight must be positive");
            vv[i] = v(sample[i]);
            radius[i] = sample[i].norm();
        }

        // Nested sub-samples by radius: quarter, half, full extent.
        const Real rmax = *std::max_element(radius.begin(), radius.end());
        const Real cuts[3] = {rmax / 4, rmax / 2, rmax};
        ModerateEstimate est;
        est.nested.assign(3, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
            {
                const Real q = m(sample[i] + sample[j]) / (mv[i] * vv[j]);
                const Real r = std::max(radius[i], radius[j]);
                for (int c = 0; c < 3; ++c)
                    if (r <= cuts[c] * (1 + 1e-12))
                        est.nested[c] = std::max(est.nested[c], q);
            }
        est.constant = est.nested[2];
        // Bounded ratios saturate; flag if the estimate is still climbing by >50% per doubling.
        est.unbounded_growth = est.nested[0] > 0 && est.nested[1] > 1.5 * est.nested[0] && est.nested[2] > 1.5 * est.nested[1];
        return est;
    }

    RVector weight_table(const TruncatedLattice& lattice, const WeightFn& w)
    {
        RVector t(lattice.size());
        for (Eigen::Index k = 0; k < lattice.size(); ++k)
            t[k] = w(lattice.point(k));
        return t;
    }

    RVector weight_table(const LatticeMap& psi, const WeightFn& w)
    {
        RVector t(psi.lattice().size());
        for (Eigen::Index k = 0; k < t.size(); ++k)
            t[k] = w(psi.target_point(k));
        return t;
    }
}  // namespace tflab
