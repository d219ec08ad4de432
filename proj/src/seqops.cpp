#include "tflab/seqops.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/SVD>

namespace tflab
{
    DiagonalDecomposition diagonal_decompose(const LatticeMatrix& A, const LatticeMap& psi, Real tol)
    {
        const TruncatedLattice& lat = A.lattice;
        if (psi.lattice().size() != lat.size())
            throw ShapeError("lattice map and matrix use different truncations");
        DiagonalDecomposition dec;
        for (Eigen::Index l = 0; l < lat.size(); ++l)
        {
            const IVector base = psi.target(l);
            for (Eigen::Index m = 0; m < lat.size(); ++m)
            {
                const Complex a = A.entries(m, l);
                if (a == Complex(0))
                    continue;
                dec.max_entry = std::max(dec.max_entry, std::abs(a));
                const IVector gamma = IVector(lat.coords(m)) - base;
                auto it = dec.diagonals.find(gamma);
                if (it == dec.diagonals.end())
                    it = dec.diagonals.emplace(gamma, CVector::Zero(lat.size())).first;
                it->second[l] = a;
            }
        }
        dec.reassembly_error = (reassemble(dec.diagonals, psi) - A.entries).cwiseAbs().maxCoeff();
        if (!(dec.reassembly_error <= tol))
            throw ConsistencyError("diagonal reassembly differs from the matrix by " + std::to_string(dec.reassembly_error));
        return dec;
    }

    CMatrix shifted_diag_matrix(const CVector& a, const LatticeMap& psi, const IVector& gamma)
    {
        const TruncatedLattice& lat = psi.lattice();
        if (a.size() != lat.size())
            throw ShapeError("diagonal does not match the lattice");
        CMatrix M = CMatrix::Zero(lat.size(), lat.size());
        // D_{a, psi} e_lambda = a_lambda e_{psi(lambda)}; T_gamma moves it to psi(lambda) + gamma.
        for (Eigen::Index l = 0; l < lat.size(); ++l)
            if (auto row = lat.index_of(IVector(psi.target(l)) + gamma))
                M(*row, l) += a[l];
        return M;
    }

    CMatrix reassemble(const DiagonalStore& diagonals, const LatticeMap& psi)
    {
        const TruncatedLattice& lat = psi.lattice();
        CMatrix M = CMatrix::Zero(lat.size(), lat.size());
        for (const auto& [gamma, a] : diagonals)
            for (Eigen::Index l = 0; l < lat.size(); ++l)
                if (a[l] != Complex(0))
                    if (auto row = lat.index_of(IVector(psi.target(l)) + gamma))
                        M(*row, l) += a[l];
        return M;
    }

    CVector apply_shifted_diag(const CVector& a, const LatticeMap& psi, const CVector& x, DiagMode mode)
    {
        const TruncatedLattice& lat = psi.lattice();
        if (a.size() != lat.size() || x.size() != lat.size())
            throw ShapeError("sequence does not match the lattice");
        CVector y = CVector::Zero(lat.size());
        for (Eigen::Index l = 0; l < lat.size(); ++l)
        {
            const auto t = lat.index_of(IVector(psi.target(l)));
            if (!t)
                continue;
            if (mode == DiagMode::Direct)
                y[*t] += a[l] * x[l];
            else
                y[l] = a[l] * x[*t];
        }
        return y;
    }

    CVector apply_I_psi(const LatticeMap& psi, const CVector& x)
    {
        return apply_shifted_diag(CVector::Ones(x.size()), psi, x, DiagMode::Direct);
    }

    CVector apply_J_psi(const LatticeMap& psi, const CVector& x)
    {
        return apply_shifted_diag(CVector::Ones(x.size()), psi, x, DiagMode::Transpose);
    }

    Real j_psi_bound(const AdmissibilityReport& adm, Real p, Real q)
    {
        detail::check_exponent(p);
        detail::check_exponent(q);
        const Real ip = std::isinf(p) ? 0 : 1 / p;
        const Real iq = std::isinf(q) ? 0 : 1 / q;
        return static_cast<Real>(adm.offset_set.size()) * std::pow(adm.M, iq) * std::pow(adm.M1, ip);
    }

    ClassReport class_norm(const DiagonalDecomposition& dec, const TruncatedLattice& lattice, const WeightSpec& v)
    {
        ClassReport rep;
        const Lattice& base = lattice.base();
        Real reach = 0;
        std::vector<Real> radius;
        for (const auto& [gamma, a] : dec.diagonals)
        {
            ClassTerm t;
            t.gamma = gamma;
            t.sup = a.cwiseAbs().maxCoeff();
            const RVector p = base.point(gamma);
            t.phi = v(p) * t.sup;
            rep.total += t.phi;
            radius.push_back(p.cwiseAbs().maxCoeff());
            reach = std::max(reach, radius.back());
            rep.terms.push_back(std::move(t));
        }
        Real shell = 0;
        for (std::size_t i = 0; i < rep.terms.size(); ++i)
            if (radius[i] > reach - 1)
                shell += rep.terms[i].phi;
        rep.tail = rep.total > 0 ? shell / rep.total : 0;
        return rep;
    }

    ClassReport class_norm(const LatticeMatrix& A, const WeightSpec& v, const LatticeMap& psi)
    {
        return class_norm(diagonal_decompose(A, psi), A.lattice, v);
    }

    ApplyResult apply_matrix(const LatticeMatrix& A, const CVector& x, Real p, const RVector& m_in, const RVector& m_out)
    {
        if (x.size() != A.size() || m_in.size() != A.size() || m_out.size() != A.size())
            throw ShapeError("vector or weights do not match the matrix");
        ApplyResult r;
        r.y = A.entries * x;
        const Real nx = lp_norm(x, p, m_in);
        r.ratio = nx > 0 ? lp_norm(r.y, p, m_out) / nx : 0;
        return r;
    }

    ApplyResult apply_matrix_mixed(const LatticeMatrix& A, const CVector& x, Real p, Real q, const RVector& m_in,
                                   const RVector& m_out)
    {
        if (x.size() != A.size())
            throw ShapeError("vector does not match the matrix");
        ApplyResult r;
        r.y = A.entries * x;
        const Real nx = lattice_lpq_norm(A.lattice, x, p, q, m_in);
        r.ratio = nx > 0 ? lattice_lpq_norm(A.lattice, r.y, p, q, m_out) / nx : 0;
        return r;
    }

    CompactnessVerdict compactness_diagnostic(const DiagonalDecomposition& dec, const LatticeMap& psi,
                                              const CompactnessOptions& opts)
    {
        const TruncatedLattice& lat = psi.lattice();
        const Lattice& base = lat.base();
        CompactnessVerdict v;
        v.theta = opts.theta;
        v.radii = opts.radii;
        if (v.radii.empty())
        {
            const Real step = std::min(base.alpha, base.beta);
            for (Real r = 0; r <= lat.radius() + 1e-12; r += step)
                v.radii.push_back(r);
        }
        std::sort(v.radii.begin(), v.radii.end());

        std::vector<Real> norm_inf(static_cast<std::size_t>(lat.size()));
        for (Eigen::Index l = 0; l < lat.size(); ++l)
            norm_inf[static_cast<std::size_t>(l)] = lat.point(l).cwiseAbs().maxCoeff();

        // Tails are measured against the global scale: for summable diagonals, "every
        // a^gamma in c_0" is the same as sup_gamma t_gamma(R) -> 0, and a per-diagonal
        // scale would judge negligible far diagonals whose maximum happens to sit at the edge.
        const Real floor = opts.noise_floor * dec.max_entry;
        std::vector<GammaTail> judged;
        Real scale = 0;
        for (const auto& [gamma, a] : dec.diagonals)
        {
            GammaTail g;
            g.gamma = gamma;
            g.sup = a.cwiseAbs().maxCoeff();
            if (!(g.sup > floor))
                continue;
            g.tails.assign(v.radii.size(), 0);
            g.observed.assign(v.radii.size(), 0);
            for (Eigen::Index l = 0; l < lat.size(); ++l)
            {
                if (!lat.index_of(IVector(psi.target(l)) + gamma))
                    continue;
                const Real r = norm_inf[static_cast<std::size_t>(l)];
                for (std::size_t i = 0; i < v.radii.size() && v.radii[i] <= r + 1e-12; ++i)
                {
                    g.tails[i] = std::max(g.tails[i], std::abs(a[l]));
                    ++g.observed[i];
                }
            }
            scale = std::max(scale, g.tails[0]);
            judged.push_back(std::move(g));
        }
        v.scale = std::max(scale, floor);
        v.compact = v.decisive = true;
        for (auto& g : judged)
        {
            std::size_t last = 0;
            for (std::size_t i = 0; i < v.radii.size(); ++i)
                if (g.observed[i] > 0)
                    last = i;
            g.ratio = v.scale > 0 ? g.tails[last] / v.scale : 0;
            g.pass = g.ratio <= opts.theta;
            g.decisive = g.ratio <= opts.decisive_theta;
            v.compact = v.compact && g.pass;
            v.decisive = v.decisive && g.decisive;
            v.worst_ratio = std::max(v.worst_ratio, g.ratio);
        }
        v.per_gamma = std::move(judged);
        return v;
    }

    ShellGain shell_gain(const LatticeMatrix& A, Real p, Real q, int random_probes, unsigned seed)
    {
        const TruncatedLattice& lat = A.lattice;
        const RVector one = RVector::Ones(lat.size());
        const Real R = lat.radius();
        std::vector<char> shell(static_cast<std::size_t>(lat.size()));
        for (Eigen::Index k = 0; k < lat.size(); ++k)
            shell[static_cast<std::size_t>(k)] = lat.point(k).cwiseAbs().maxCoeff() >= R - 1e-9;
        ShellGain g;
        for (Eigen::Index k = 0; k < lat.size(); ++k)
        {
            const Real c = lattice_lpq_norm(lat, A.entries.col(k), p, q, one);
            g.whole = std::max(g.whole, c);
            if (shell[static_cast<std::size_t>(k)])
                g.shell = std::max(g.shell, c);
        }
        std::mt19937 rng(seed);
        std::normal_distribution<Real> N01;
        for (int t = 0; t < random_probes; ++t)
        {
            CVector x(lat.size());
            for (auto& v : x)
                v = Complex(N01(rng), N01(rng));
            g.whole = std::max(g.whole, apply_matrix_mixed(A, x, p, q, one, one).ratio);
            for (Eigen::Index k = 0; k < lat.size(); ++k)
                if (!shell[static_cast<std::size_t>(k)])
                    x[k] = 0;
            g.shell = std::max(g.shell, apply_matrix_mixed(A, x, p, q, one, one).ratio);
        }
        g.ratio = g.whole > 0 ? g.shell / g.whole : 0;
        return g;
    }

    OracleVerdict section_singular_values(const LatticeMatrix& A, const std::vector<int>& sizes, const WeightFn& m,
                                          const LatticeMap& psi, const SectionOptions& opts)
    {
        const TruncatedLattice& lat = A.lattice;
        if (sizes.empty())
            throw ParameterError("need at least one section size");
        if (!std::is_sorted(sizes.begin(), sizes.end()) || std::adjacent_find(sizes.begin(), sizes.end()) != sizes.end())
            throw ParameterError("section sizes must be strictly increasing");
        const int kmax = std::min(lat.time_index_radius(), lat.freq_index_radius());

        const RVector m_out = weight_table(lat, m);
        const RVector m_in = weight_table(psi, m);
        OracleVerdict ov;
        for (int n : sizes)
        {
            SectionSpectrum s;
            s.n = n;
            s.index_radius = n / 2;
            if (n < 1 || s.index_radius > kmax)
                throw ShapeError("section " + std::to_string(n) + " exceeds the truncation");
            std::vector<Eigen::Index> idx;
            for (Eigen::Index k = 0; k < lat.size(); ++k)
                if (lat.coords(k).cwiseAbs().maxCoeff() <= s.index_radius)
                    idx.push_back(k);
            const auto dim = static_cast<Eigen::Index>(idx.size());
            CMatrix sub(dim, dim);
            for (Eigen::Index c = 0; c < dim; ++c)
                for (Eigen::Index r = 0; r < dim; ++r)
                {
                    const Eigen::Index mu = idx[static_cast<std::size_t>(r)], la = idx[static_cast<std::size_t>(c)];
                    sub(r, c) = m_out[mu] * A.entries(mu, la) / m_in[la];
                }
            Eigen::BDCSVD<CMatrix> svd(sub);
            s.svals = svd.singularValues();
            const Real top = s.svals.size() ? s.svals[0] : 0;
            s.count_above = top > 0 ? (s.svals.array() > opts.tau * top).count() : 0;
            ov.sections.push_back(std::move(s));
        }
        if (ov.sections.size() < 2)
            ov.compact = true;  // nothing to compare; a single section cannot show growth
        else
        {
            const auto& a = ov.sections[ov.sections.size() - 2];
            const auto& b = ov.sections.back();
            ov.compact = static_cast<Real>(b.count_above) <= (1 + opts.growth_tol) * static_cast<Real>(a.count_above);
        }
        return ov;
    }
}  // namespace tflab
