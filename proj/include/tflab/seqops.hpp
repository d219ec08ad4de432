#pragma once

#include <map>
#include <string>
#include <vector>

#include "tflab/lattice.hpp"
#include "tflab/lattice_matrix.hpp"
#include "tflab/types.hpp"
#include "tflab/weights.hpp"

namespace tflab
{
    /// psi-relative diagonals gamma -> a^gamma with a^gamma_lambda = a_{psi(lambda) + gamma, lambda}
    /// (zero where psi(lambda) + gamma leaves the truncation).
    using DiagonalStore = std::map<IVector, CVector, CoordLess>;

    struct DiagonalDecomposition
    {
        DiagonalStore diagonals;     ///< every gamma carrying a nonzero entry
        Real reassembly_error = 0;   ///< max |A - sum_gamma T_gamma D_{a^gamma, psi}|
        Real max_entry = 0;          ///< max |A|
    };

    /// Extracts all psi-diagonals and checks the reassembly against A; throws
    /// ConsistencyError if it differs by more than tol.
    DiagonalDecomposition diagonal_decompose(const LatticeMatrix& A, const LatticeMap& psi, Real tol = 1e-12);

    /// Matrix of T_gamma o D_{a, psi} restricted to Lambda_R x Lambda_R.
    CMatrix shifted_diag_matrix(const CVector& a, const LatticeMap& psi, const IVector& gamma);
    /// sum_gamma T_gamma o D_{a^gamma, psi}.
    CMatrix reassemble(const DiagonalStore& diagonals, const LatticeMap& psi);

    enum class DiagMode
    {
        Direct,    ///< y_gamma = sum_{psi(lambda) = gamma} a_lambda x_lambda
        Transpose  ///< y_lambda = a_lambda x_{psi(lambda)}
    };

    /// D_{a, psi} or its transpose on Lambda_R; images outside the truncation are dropped
    /// and reads outside it are zero.
    CVector apply_shifted_diag(const CVector& a, const LatticeMap& psi, const CVector& x, DiagMode mode = DiagMode::Direct);
    /// I_psi = D_{1, psi}.
    CVector apply_I_psi(const LatticeMap& psi, const CVector& x);
    /// J_psi x = (x_{psi(lambda)})_lambda.
    CVector apply_J_psi(const LatticeMap& psi, const CVector& x);
    /// |K| M^{1/q} M1^{1/p}, the l^{p,q} bound for J_psi of an admissible map.
    Real j_psi_bound(const AdmissibilityReport& adm, Real p, Real q);

    struct ClassTerm
    {
        IVector gamma;
        Real sup = 0;  ///< sup_lambda |a^gamma_lambda|
        Real phi = 0;  ///< v(gamma) * sup
    };

    struct ClassReport
    {
        std::vector<ClassTerm> terms;
        Real total = 0;  ///< sum_gamma phi(gamma)
        Real tail = 0;   ///< share of `total` from the outermost unit shell of gammas
    };

    /// sum_gamma v(gamma) sup_lambda |a_{psi(lambda) + gamma, lambda}| over the stored window.
    ClassReport class_norm(const LatticeMatrix& A, const WeightSpec& v, const LatticeMap& psi);
    ClassReport class_norm(const DiagonalDecomposition& dec, const TruncatedLattice& lattice, const WeightSpec& v);

    struct ApplyResult
    {
        CVector y;
        Real ratio = 0;  ///< ||y||_{out} / ||x||_{in}
    };

    /// y = A x with ||y||_{l^p_{m_out}} / ||x||_{l^p_{m_in}}; weights are per lattice point.
    ApplyResult apply_matrix(const LatticeMatrix& A, const CVector& x, Real p, const RVector& m_in, const RVector& m_out);
    /// Same with l^{p,q} norms (inner time index, outer frequency index).
    ApplyResult apply_matrix_mixed(const LatticeMatrix& A, const CVector& x, Real p, Real q, const RVector& m_in,
                                   const RVector& m_out);

    struct CompactnessOptions
    {
        Real theta = 0.25;           ///< pass iff tail(R_max) <= theta * scale
        Real decisive_theta = 1e-3;  ///< stricter threshold, reported alongside
        Real noise_floor = 1e-10;    ///< relative to max |A|; weaker diagonals are not judged
        std::vector<Real> radii;     ///< empty: 0, step, ..., R with step = min(alpha, beta)
    };

    struct GammaTail
    {
        IVector gamma;
        Real sup = 0;
        std::vector<Real> tails;                ///< t_gamma(R) over observable entries
        std::vector<Eigen::Index> observed;     ///< observable entries with |lambda|_inf >= R
        Real ratio = 0;                         ///< tail at the last observed radius / scale
        bool pass = false;
        bool decisive = false;
    };

    struct CompactnessVerdict
    {
        std::vector<Real> radii;
        std::vector<GammaTail> per_gamma;  ///< judged diagonals only
        Real theta = 0;
        Real scale = 0;         ///< max_gamma t_gamma(0): largest observable entry
        Real worst_ratio = 0;
        bool compact = false;   ///< every judged gamma passes theta
        bool decisive = false;  ///< every judged gamma passes decisive_theta
        std::string verdict() const { return compact ? "compact-consistent" : "non-compact"; }
    };

    /// Finite-scale proxy for "a^gamma in c_0 for every gamma": t_gamma(R) = sup of |a^gamma_lambda|
    /// over |lambda|_inf >= R, counting only entries whose row psi(lambda) + gamma is in the
    /// truncation, compared at the last observed radius with the global scale max_gamma t_gamma(0).
    CompactnessVerdict compactness_diagnostic(const DiagonalDecomposition& dec, const LatticeMap& psi,
                                              const CompactnessOptions& opts = {});

    struct ShellGain
    {
        Real whole = 0;  ///< largest sampled ||A x|| / ||x|| over all probes
        Real shell = 0;  ///< same over probes supported in |lambda|_inf >= R
        Real ratio = 0;  ///< shell / whole (0 for A = 0)
    };

    /// Sampled l^{p,q} gains of A on the whole truncation and on its outer shell, probed
    /// with every unit spike and `random_probes` Gaussian vectors. Unlike the diagonal
    /// diagnostic, which reads sup norms only, this proxy depends on (p, q).
    ShellGain shell_gain(const LatticeMatrix& A, Real p, Real q, int random_probes = 20, unsigned seed = 0);

    struct SectionOptions
    {
        Real tau = 0.25;         ///< singular values above tau * s_1 are counted
        Real growth_tol = 0.05;  ///< allowed relative growth of the count between the last two sections
    };

    struct SectionSpectrum
    {
        int n = 0;                 ///< requested section size
        int index_radius = 0;      ///< |coords|_inf <= n / 2
        RVector svals;             ///< descending
        Eigen::Index count_above = 0;
    };

    struct OracleVerdict
    {
        std::vector<SectionSpectrum> sections;
        bool compact = false;
        std::string verdict() const { return compact ? "compact-consistent" : "non-compact signature"; }
    };

    /// Singular values of centered sections of D_m A D_{m o psi}^{-1}. The count of
    /// singular values above tau * s_1 stays put for compact operators and keeps growing
    /// with the section for operators with a nonzero essential spectrum.
    OracleVerdict section_singular_values(const LatticeMatrix& A, const std::vector<int>& sizes, const WeightFn& m,
                                          const LatticeMap& psi, const SectionOptions& opts = {});
}  // namespace tflab
