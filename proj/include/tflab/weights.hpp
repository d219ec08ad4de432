#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tflab/lattice.hpp"
#include "tflab/types.hpp"

namespace tflab
{
    /// Weight evaluator on phase space.
    using WeightFn = std::function<Real(const RVector&)>;

    /// Weight on R^{2d}: polynomial <r>^s = (1 + |r|^2)^{s/2}, constant 1, or a tabulated evaluator.
    struct WeightSpec
    {
        enum class Kind
        {
            Polynomial,
            Constant,
            Tabulated
        };

        Kind kind = Kind::Constant;
        Real s = 0;
        WeightFn table;
        std::string name = "1";

        static WeightSpec polynomial(Real s);
        static WeightSpec constant();
        static WeightSpec tabulated(WeightFn f, std::string name);

        Real operator()(const RVector& r) const;
    };

    Real weight_eval(const WeightSpec& w, const RVector& r);

    /// Best constant in <r+k>^t <= C <r>^t <k>^s for 0 <= t <= s: (4/3)^{t/2}.
    /// Polynomial weights are not exactly submultiplicative; 4/3 is the maximum of
    /// (1+|r+k|^2) / ((1+|r|^2)(1+|k|^2)), attained at r = k, |r|^2 = 1/2.
    Real polynomial_moderate_constant(Real t, Real s);

    /// Closed-form constant for the weight pairs the library knows about (constant
    /// or polynomial m, polynomial v); throws UnsupportedError otherwise.
    Real moderate_constant(const WeightSpec& m, const WeightSpec& v);

    struct ModerateEstimate
    {
        Real constant = 0;             ///< max over the whole sample
        std::vector<Real> nested;      ///< same max over nested sub-samples (by radius)
        bool unbounded_growth = false; ///< nested maxima keep increasing substantially
    };

    /// Sampled sup of m(r+k) / (m(r) v(k)) over all pairs of `sample`.
    ModerateEstimate moderate_constant_estimate(const WeightFn& m, const WeightSpec& v, const std::vector<RVector>& sample);

    /// Weight values at every point of a truncated lattice.
    RVector weight_table(const TruncatedLattice& lattice, const WeightFn& w);
    /// Weight values at psi(lambda) for every lambda in the truncation.
    RVector weight_table(const LatticeMap& psi, const WeightFn& w);
}  // namespace tflab
