#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>

#include "tflab/io.hpp"
#include "tflab/psdo.hpp"
#include "tflab/seqops.hpp"
#include "tflab/weights.hpp"

namespace tflab::cli
{
    namespace
    {
        // JSON has no infinities; keep them readable instead of null.
        json num(Real v)
        {
            if (std::isnan(v))
                return "nan";
            if (std::isinf(v))
                return v > 0 ? "inf" : "-inf";
            return v;
        }

        std::string exp_name(Real p) { return std::isinf(p) ? "inf" : io::json(p).dump(); }

        struct Csv
        {
            std::ofstream os;
            Csv(const std::string& dir, const std::string& name, Report& rep, const std::string& header)
                : os(dir + "/" + name)
            {
                if (!os)
                    throw IoError("cannot write " + dir + "/" + name);
                os << std::setprecision(12) << header << '\n';
                rep.files.push_back(name);
            }
        };

        // Three Gaussian atoms inside [-1, 1]^2 of phase space, unit norm.
        SampledSignal random_signal(std::mt19937& rng, Real L, Eigen::Index N)
        {
            std::uniform_real_distribution<Real> pos(-1, 1), width(0.8, 1.25), amp(-1, 1);
            Real c[3], w[3], s[3];
            Complex a[3];
            for (int k = 0; k < 3; ++k)
            {
                c[k] = pos(rng);
                w[k] = pos(rng);
                s[k] = width(rng);
                a[k] = Complex(amp(rng), amp(rng));
            }
            SampledSignal f = SampledSignal::from_function(L, N, [&](Real t) {
                Complex v = 0;
                for (int k = 0; k < 3; ++k)
                    v += a[k] * std::exp(-kPi * (t - c[k]) * (t - c[k]) / (s[k] * s[k])) * std::exp(kTwoPi * kI * w[k] * t);
                return v;
            });
            f.data() /= f.norm();
            return f;
        }

        CVector random_vector(std::mt19937& rng, Eigen::Index n)
        {
            std::normal_distribution<Real> N01;
            CVector x(n);
            for (auto& v : x)
                v = Complex(N01(rng), N01(rng));
            return x;
        }

        Real rel_err(const SampledSignal& a, const SampledSignal& f) { return (a.data() - f.data()).norm() / f.norm(); }

        PhaseMap chi_of(const PhaseSpec& phi)
        {
            const CanonicalMap chi(phi);
            return [chi](const RVector& p) { return chi(p); };
        }

        LatticeMap chi_prime(const PhaseMap& chi, const TruncatedLattice& lat)
        {
            return discretize_chi(chi, lat, FundamentalDomain(lat.base())).map();
        }

        LatticeMatrix fio_matrix(const ExperimentConfig& c, const GaborSystem& sys)
        {
            return gabor_matrix(fio_operator(make_symbol(c.symbol), make_phase(c.phase), sys.L(), sys.N()), sys);
        }

        WeightFn poly(Real t)
        {
            const WeightSpec w = t == 0 ? WeightSpec::constant() : WeightSpec::polynomial(t);
            return [w](const RVector& r) { return w(r); };
        }

        CompactnessOptions diag_options(const ExperimentConfig& c)
        {
            CompactnessOptions o;
            o.theta = c.thresholds.theta;
            o.decisive_theta = c.thresholds.decisive_theta;
            o.noise_floor = c.thresholds.noise_floor;
            return o;
        }

        void maybe_write_matrix(const ExperimentConfig& c, const std::string& dir, const std::string& name,
                                const LatticeMatrix& M, Report& rep)
        {
            if (!c.write_matrices)
                return;
            io::write_matrix(dir + "/" + name, M);
            rep.files.push_back(name);
        }

        void write_tails(const std::string& dir, const CompactnessVerdict& v, Report& rep)
        {
            Csv csv(dir, "tails.csv", rep, "gamma0,gamma1,sup,ratio,pass");
            for (const GammaTail& g : v.per_gamma)
                csv.os << g.gamma[0] << ',' << g.gamma[1] << ',' << g.sup << ',' << g.ratio << ',' << g.pass << '\n';
        }

        void write_svals(const std::string& dir, const OracleVerdict& v, Report& rep)
        {
            Csv csv(dir, "svals.csv", rep, "n,index,sval");
            for (const SectionSpectrum& s : v.sections)
                for (Eigen::Index i = 0; i < s.svals.size(); ++i)
                    csv.os << s.n << ',' << i << ',' << s.svals[i] << '\n';
        }

        void frames(const ExperimentConfig& c, const std::string& dir, Report& rep)
        {
            const GaborSystem sys = make_system(c, c.R);
            const FrameBounds fb = frame_bounds(sys);
            SolveReport solve;
            const SampledSignal h = dual_window(sys, &solve);
            const GaborSystem dual = sys.with_window(h);
            const SampledSignal gt = tight_window(sys);
            const FrameBounds tb = frame_bounds(sys.with_window(gt));

            std::mt19937 rng(c.seed);
            Real gh = 0, hg = 0;
            int used = 0, tried = 0;
            {
                Csv csv(dir, "reconstruction.csv", rep, "signal,tail,err_gh,err_hg");
                for (; used < c.signals && tried < 10 * c.signals; ++tried)
                {
                    const SampledSignal f = random_signal(rng, sys.L(), sys.N());
                    const Real tail = tail_indicator(sys, f);
                    if (tail > c.thresholds.signal_tail)
                        continue;
                    const Real a = rel_err(synthesis(sys, analysis(dual, f)), f);
                    const Real b = rel_err(synthesis(dual, analysis(sys, f)), f);
                    gh = std::max(gh, a);
                    hg = std::max(hg, b);
                    csv.os << used++ << ',' << tail << ',' << a << ',' << b << '\n';
                }
            }
            {
                Csv csv(dir, "windows.csv", rep, "t,g_re,g_im,h_re,h_im,gt_re,gt_im");
                const SampledSignal& g = sys.window();
                for (Eigen::Index j = 0; j < g.N(); ++j)
                    csv.os << g.position(j) << ',' << g[j].real() << ',' << g[j].imag() << ',' << h[j].real() << ','
                           << h[j].imag() << ',' << gt[j].real() << ',' << gt[j].imag() << '\n';
            }
            rep.results["frame_bounds"] = io::to_json(fb);
            rep.results["dual"] = {{"iterations", solve.iterations}, {"residual", solve.residual}};
            rep.results["tight_bounds"] = io::to_json(tb);
            rep.results["reconstruction"] = {{"signals", used}, {"tried", tried}, {"max_err_gh", gh}, {"max_err_hg", hg}};
            rep.check("frame_bounds_positive", fb.A > 0, num(fb.A), 0);
            rep.check("dual_residual", solve.residual <= 1e-10, solve.residual, 1e-10);
            rep.check("signals_accepted", used == c.signals, used, c.signals);
            rep.check("reconstruction_DgCh", gh <= c.thresholds.reconstruction, gh, c.thresholds.reconstruction);
            rep.check("reconstruction_DhCg", hg <= c.thresholds.reconstruction, hg, c.thresholds.reconstruction);
            rep.check("tight_ratio_minus_one", tb.ratio() - 1 <= c.thresholds.tight, tb.ratio() - 1, c.thresholds.tight);
        }

        void decay(const ExperimentConfig& c, const std::string& dir, Report& rep)
        {
            const GaborSystem sys = make_system(c, c.R);
            const LatticeMatrix M = fio_matrix(c, sys);
            const PhaseMap chi = chi_of(make_phase(c.phase));
            const DecayFit fit = decay_fit(M, chi, c.thresholds.decay_floor);
            {
                Csv csv(dir, "envelope.csv", rep, "distance_lo,envelope");
                for (std::size_t i = 0; i < fit.envelope.size(); ++i)
                    csv.os << fit.bucket_lo[i] << ',' << fit.envelope[i] << '\n';
            }
            io::write_matrix_csv(dir + "/matrix.csv", M, &chi);
            rep.files.push_back("matrix.csv");
            maybe_write_matrix(c, dir, "matrix.bin", M, rep);
            rep.results["fit"] = io::to_json(fit);
            rep.check("decay_exponent", fit.s >= c.thresholds.min_decay, fit.s, c.thresholds.min_decay);
            rep.check("envelope_constant_finite", std::isfinite(fit.C), num(fit.C), "finite");
            rep.check("envelope_monotone", fit.envelope_monotone, fit.envelope_monotone, true);
        }

        void twopath(const ExperimentConfig& c, const std::string& dir, Report& rep)
        {
            const GaborSystem sys = make_system(c, c.R);
            const Symbol sigma = make_symbol(c.symbol);
            const PhaseSpec phi = make_phase(c.phase);
            const LatticeMatrix Q = gabor_matrix(fio_operator(sigma, phi, sys.L(), sys.N()), sys);
            const LatticeMatrix S = gabor_matrix_quadratic_stft(sigma, phi, sys);
            const TruncatedLattice& lat = sys.lattice();
            Real worst = 0;
            Eigen::Index compared = 0;
            {
                Csv csv(dir, "twopath.csv", rep, "lambda0,lambda1,mu0,mu1,quadrature,stft,rel_dev");
                for (Eigen::Index l = 0; l < lat.size(); ++l)
                    for (Eigen::Index m = 0; m < lat.size(); ++m)
                    {
                        const Real a = std::abs(Q.entries(m, l)), b = std::abs(S.entries(m, l));
                        if (a < c.thresholds.twopath_floor)
                            continue;
                        const Real dev = std::abs(a - b) / a;
                        worst = std::max(worst, dev);
                        ++compared;
                        const RVector pl = lat.point(l), pm = lat.point(m);
                        csv.os << pl[0] << ',' << pl[1] << ',' << pm[0] << ',' << pm[1] << ',' << a << ',' << b << ',' << dev << '\n';
                    }
            }
            maybe_write_matrix(c, dir, "quadrature.bin", Q, rep);
            rep.results["twopath"] = {{"compared", compared}, {"floor", c.thresholds.twopath_floor}, {"max_rel_dev", worst}};
            rep.check("twopath_max_rel_dev", worst <= c.thresholds.twopath, worst, c.thresholds.twopath);
        }

        void compactness(const ExperimentConfig& c, const std::string& dir, Report& rep)
        {
            const GaborSystem sys = make_system(c, c.R);
            const LatticeMatrix M = fio_matrix(c, sys);
            const LatticeMap psi = chi_prime(chi_of(make_phase(c.phase)), sys.lattice());
            const SectionOptions so{c.thresholds.tau};
            const auto dec = diagonal_decompose(M, psi);
            const CompactnessVerdict diag = compactness_diagnostic(dec, psi, diag_options(c));
            const OracleVerdict orac = section_singular_values(M, c.sections, poly(0), psi, so);
            write_tails(dir, diag, rep);
            write_svals(dir, orac, rep);
            maybe_write_matrix(c, dir, "matrix.bin", M, rep);

            const bool ref = diag.compact;
            bool stable = orac.compact == ref;
            json sweep = json::array();
            {
                Csv csv(dir, "sweep.csv", rep, "kind,parameter,value,compact");
                for (Real t : c.m_weights)
                {
                    const RVector out = weight_table(sys.lattice(), poly(t)), in = weight_table(psi, poly(t));
                    const LatticeMatrix W(sys.lattice(), out.asDiagonal() * M.entries * in.cwiseInverse().asDiagonal());
                    const auto d = compactness_diagnostic(diagonal_decompose(W, psi), psi, diag_options(c));
                    const auto o = section_singular_values(M, c.sections, poly(t), psi, so);
                    stable = stable && d.compact == ref && o.compact == ref;
                    csv.os << "diagnostic,m=v" << t << ',' << d.worst_ratio << ',' << d.compact << '\n';
                    csv.os << "oracle,m=v" << t << ",," << o.compact << '\n';
                    sweep.push_back({{"m", "v_" + io::json(t).dump()}, {"diagnostic", d.verdict()}, {"oracle", o.verdict()}});
                }
                unsigned seed = c.seed;
                for (Real p : c.p)
                    for (Real q : c.q)
                    {
                        const ShellGain g = shell_gain(M, p, q, 20, seed++);
                        const bool compact = g.ratio <= c.thresholds.theta;
                        stable = stable && compact == ref;
                        csv.os << "shell_gain,p=" << exp_name(p) << " q=" << exp_name(q) << ',' << g.ratio << ',' << compact << '\n';
                        sweep.push_back({{"p", exp_name(p)}, {"q", exp_name(q)}, {"shell_gain_ratio", g.ratio},
                                         {"verdict", compact ? "compact-consistent" : "non-compact"}});
                    }
            }
            const ClassReport cls = class_norm(dec, sys.lattice(), WeightSpec::polynomial(c.class_weight));
            rep.results["diagnostic"] = io::to_json(diag);
            rep.results["oracle"] = io::to_json(orac);
            rep.results["sweep"] = std::move(sweep);
            rep.results["class_norm"] = io::to_json(cls);
            rep.results["reassembly_error"] = dec.reassembly_error;
            rep.check("diagnostic_matches_oracle", diag.compact == orac.compact, diag.verdict(), orac.verdict());
            rep.check("verdict_stable_across_sweeps", stable, stable, true);
            if (c.expect_compact >= 0)
                rep.check("expected_verdict", diag.compact == (c.expect_compact == 1), diag.verdict(),
                          c.expect_compact == 1 ? "compact-consistent" : "non-compact");
        }

        void psdo(const ExperimentConfig& c, const std::string& dir, Report& rep)
        {
            const GaborSystem sys = make_system(c, c.R);
            const Symbol sigma = make_symbol(c.symbol);
            const auto pairs = sample_identity_pairs(sys.lattice(), static_cast<std::size_t>(c.pairs), c.pair_offset, c.seed);
            const IdentityCheck chk = weyl_gabor_identity_check(sigma, sys, pairs, c.thresholds.identity_floor);

            // (1) M0 profile of the symbol, (2) diagonal diagnostic and (3) oracle of its Gabor matrix.
            std::vector<Real> radii;
            for (Real r = 0; r <= 0.625 * c.L + 1e-9; r += 2)
                radii.push_back(r);
            DecayProfileOptions po;
            po.theta = c.thresholds.profile_theta;
            const DecayProfile prof =
                decay_at_infinity_profile(PhaseSpaceFunction::sample(c.L, 64, c.L, 64, sigma.fn()), gaussian_phase_window(), radii, po);
            const LatticeMatrix W = gabor_matrix(weyl_operator(sigma, sys.L(), sys.N()), sys);
            const LatticeMap id = LatticeMap::identity(sys.lattice());
            const CompactnessVerdict diag = compactness_diagnostic(diagonal_decompose(W, id), id, diag_options(c));
            const OracleVerdict orac = section_singular_values(W, c.sections, poly(0), id, SectionOptions{c.thresholds.tau});
            {
                Csv csv(dir, "profile.csv", rep, "radius,tail");
                for (std::size_t i = 0; i < prof.radii.size(); ++i)
                    csv.os << prof.radii[i] << ',' << prof.tails[i] << '\n';
            }
            write_tails(dir, diag, rep);
            write_svals(dir, orac, rep);
            maybe_write_matrix(c, dir, "weyl_matrix.bin", W, rep);
            rep.results["identity"] = io::to_json(chk);
            rep.results["chain"] = {{"profile", io::to_json(prof)}, {"diagnostic", io::to_json(diag)}, {"oracle", io::to_json(orac)}};
            rep.check("weyl_gabor_identity", chk.max_dev <= c.thresholds.identity, chk.max_dev, c.thresholds.identity);
            const bool agree = prof.consistent == diag.compact && diag.compact == orac.compact;
            rep.check("chain_agrees", agree,
                      {{"profile", prof.consistent}, {"diagnostic", diag.compact}, {"oracle", orac.compact}}, "all equal");
            if (c.expect_compact >= 0)
                rep.check("expected_verdict", diag.compact == (c.expect_compact == 1), diag.verdict(),
                          c.expect_compact == 1 ? "compact-consistent" : "non-compact");
        }

        // Sampled sup of ||J_psi x|| / ||x|| and ||I_psi x|| / ||x|| in l^{2,1} over random vectors and the
        // single-frequency witness x = 1 on eta = 0.
        std::pair<Real, Real> counterexample_ratios(const LatticeMap& psi, std::mt19937& rng, int probes)
        {
            const TruncatedLattice& lat = psi.lattice();
            const RVector one = RVector::Ones(lat.size());
            std::vector<CVector> xs;
            CVector w = CVector::Zero(lat.size());
            for (Eigen::Index k = 0; k < lat.size(); ++k)
                if (lat.coords(k)[1] == 0)
                    w[k] = 1;
            xs.push_back(w);
            for (int t = 0; t < probes; ++t)
                xs.push_back(random_vector(rng, lat.size()));
            Real J = 0, I = 0;
            for (const CVector& x : xs)
            {
                const Real nx = lattice_lpq_norm(lat, x, 2, 1, one);
                J = std::max(J, lattice_lpq_norm(lat, apply_J_psi(psi, x), 2, 1, one) / nx);
                I = std::max(I, lattice_lpq_norm(lat, apply_I_psi(psi, x), 2, 1, one) / nx);
            }
            return {J, I};
        }

        void mixed(const ExperimentConfig& c, const std::string& dir, Report& rep)
        {
            const PhaseMap chi = chi_of(make_phase(c.phase));
            std::mt19937 rng(c.seed);
            json scans = json::array(), counter = json::array();
            Real worst = 0;
            std::vector<std::size_t> chirp_K;
            Csv csv(dir, "mixed.csv", rep, "map,R,accepted,K,M,M1,max_ratio_over_bound,J21,I21");
            for (Real R : c.radii)
            {
                const TruncatedLattice lat = build_lattice(c.alpha, c.beta, 1, R);
                const RVector one = RVector::Ones(lat.size());
                const LatticeMap psi = chi_prime(chi, lat);
                const AdmissibilityReport adm = admissibility_decompose(psi);
                Real ratio = 0;
                if (adm.accepted)
                    for (Real p : c.p)
                        for (Real q : c.q)
                            for (int t = 0; t < c.vectors; ++t)
                            {
                                const CVector x = random_vector(rng, lat.size());
                                const Real lhs = lattice_lpq_norm(lat, apply_J_psi(psi, x), p, q, one);
                                ratio = std::max(ratio, lhs / (j_psi_bound(adm, p, q) * lattice_lpq_norm(lat, x, p, q, one)));
                            }
                worst = std::max(worst, ratio);
                scans.push_back({{"R", R}, {"size", lat.size()}, {"accepted", adm.accepted}, {"reason", adm.reason},
                                 {"K", adm.offset_set.size()}, {"M", adm.M}, {"M1", adm.M1}, {"max_ratio_over_bound", ratio}});
                csv.os << "configured," << R << ',' << adm.accepted << ',' << adm.offset_set.size() << ',' << adm.M << ','
                       << adm.M1 << ',' << ratio << ",,\n";

                const LatticeMap chirp = chi_prime(chi_of(make_phase({"chirp"})), lat);
                const AdmissibilityReport cadm = admissibility_decompose(chirp);
                const auto [J, I] = counterexample_ratios(chirp, rng, 20);
                chirp_K.push_back(cadm.offset_set.size());
                counter.push_back({{"R", R}, {"accepted", cadm.accepted}, {"K", cadm.offset_set.size()},
                                   {"J_psi_l21_ratio", J}, {"I_psi_l21_ratio", I}});
                csv.os << "chirp," << R << ',' << cadm.accepted << ',' << cadm.offset_set.size() << ',' << cadm.M << ','
                       << cadm.M1 << ",," << J << ',' << I << '\n';
            }
            rep.results["configured_phase"] = std::move(scans);
            rep.results["chirp_counterexample"] = std::move(counter);
            rep.check("J_psi_bound", worst <= 1 + 1e-12, worst, 1);
            bool grows = true;
            for (std::size_t i = 1; i < chirp_K.size(); ++i)
                if (c.radii[i] > c.radii[i - 1])
                    grows = grows && chirp_K[i] > chirp_K[i - 1];
            rep.check("chirp_offsets_grow", grows, chirp_K, "strictly increasing in R");
        }
    }  // namespace

    bool Report::check(const std::string& name, bool pass, json value, json bound)
    {
        assertions.push_back({{"name", name}, {"pass", pass}, {"value", std::move(value)}, {"bound", std::move(bound)}});
        return pass;
    }

    std::vector<std::string> Report::failures() const
    {
        std::vector<std::string> out;
        for (const json& a : assertions)
            if (!a["pass"].get<bool>())
                out.push_back(a["name"].get<std::string>());
        return out;
    }

    Report run_experiment(const ExperimentConfig& c, const std::string& dir)
    {
        Report rep;
        if (c.experiment == "frames")
            frames(c, dir, rep);
        else if (c.experiment == "decay")
            decay(c, dir, rep);
        else if (c.experiment == "twopath")
            twopath(c, dir, rep);
        else if (c.experiment == "compactness")
            compactness(c, dir, rep);
        else if (c.experiment == "psdo")
            psdo(c, dir, rep);
        else if (c.experiment == "mixed")
            mixed(c, dir, rep);
        else
            throw ParameterError("unknown experiment '" + c.experiment + "'");
        std::sort(rep.files.begin(), rep.files.end());
        return rep;
    }
}  // namespace tflab::cli
