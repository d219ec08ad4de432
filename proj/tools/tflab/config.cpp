#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace tflab::cli
{
    namespace
    {
        // Rejects keys outside `allowed` so a typo never silently falls back to a default.
        void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed)
        {
            if (!j.is_object())
                throw ParameterError(where + ": expected an object");
            const std::set<std::string> ok(allowed.begin(), allowed.end());
            for (const auto& [k, v] : j.items())
                if (!k.starts_with("_") && !ok.count(k))
                    throw ParameterError(where + ": unknown key '" + k + "'");
        }

        template <class T>
        void get(const json& j, const char* key, T& out, const std::string& where)
        {
            if (!j.contains(key))
                return;
            try
            {
                out = j.at(key).get<T>();
            }
            catch (const json::exception&)
            {
                throw ParameterError(where + "." + key + ": wrong type");
            }
        }

        Real exponent(const json& v, const std::string& where)
        {
            if (v.is_string() && v.get<std::string>() == "inf")
                return inf;
            if (!v.is_number())
                throw ParameterError(where + ": exponents are numbers >= 1 or \"inf\"");
            return v.get<Real>();
        }

        void get_exponents(const json& j, const char* key, std::vector<Real>& out, const std::string& where)
        {
            if (!j.contains(key))
                return;
            if (!j.at(key).is_array())
                throw ParameterError(where + "." + key + ": expected an array");
            out.clear();
            for (const json& v : j.at(key))
                out.push_back(exponent(v, where + "." + key));
        }

        json exponents_json(const std::vector<Real>& v)
        {
            json a = json::array();
            for (Real p : v)
                a.push_back(std::isinf(p) ? json("inf") : json(p));
            return a;
        }

        void require(bool ok, const std::string& what)
        {
            if (!ok)
                throw ParameterError("invalid config: " + what);
        }
    }  // namespace

    ExperimentConfig from_json(const json& j)
    {
        ExperimentConfig c;
        check_keys(j, "config", {"experiment", "grid", "lattice", "window", "phase", "symbol", "thresholds", "weights",
                                 "sweep", "samples", "expect", "output", "seed"});
        get(j, "experiment", c.experiment, "config");
        get(j, "window", c.window, "config");
        get(j, "seed", c.seed, "config");
        if (j.contains("grid"))
        {
            const json& g = j["grid"];
            check_keys(g, "grid", {"d", "L", "N"});
            int d = 1;
            get(g, "d", d, "grid");
            if (d != 1)
                throw UnsupportedError("grid.d: only d = 1 is implemented");
            get(g, "L", c.L, "grid");
            get(g, "N", c.N, "grid");
        }
        if (j.contains("lattice"))
        {
            const json& l = j["lattice"];
            check_keys(l, "lattice", {"alpha", "beta", "R"});
            get(l, "alpha", c.alpha, "lattice");
            get(l, "beta", c.beta, "lattice");
            get(l, "R", c.R, "lattice");
        }
        if (j.contains("phase"))
        {
            const json& p = j["phase"];
            check_keys(p, "phase", {"preset", "A", "B", "C", "x0", "eta0"});
            get(p, "preset", c.phase.preset, "phase");
            get(p, "A", c.phase.A, "phase");
            get(p, "B", c.phase.B, "phase");
            get(p, "C", c.phase.C, "phase");
            get(p, "x0", c.phase.x0, "phase");
            get(p, "eta0", c.phase.eta0, "phase");
        }
        if (j.contains("symbol"))
        {
            const json& s = j["symbol"];
            check_keys(s, "symbol", {"preset", "width", "radius", "steepness", "file"});
            get(s, "preset", c.symbol.preset, "symbol");
            get(s, "width", c.symbol.width, "symbol");
            get(s, "radius", c.symbol.radius, "symbol");
            get(s, "steepness", c.symbol.steepness, "symbol");
            get(s, "file", c.symbol.file, "symbol");
        }
        if (j.contains("thresholds"))
        {
            const json& t = j["thresholds"];
            Thresholds& h = c.thresholds;
            check_keys(t, "thresholds",
                       {"reconstruction", "tight", "signal_tail", "twopath", "twopath_floor", "identity", "identity_floor",
                        "min_decay", "decay_floor", "theta", "decisive_theta", "noise_floor", "tau", "profile_theta"});
            get(t, "reconstruction", h.reconstruction, "thresholds");
            get(t, "tight", h.tight, "thresholds");
            get(t, "signal_tail", h.signal_tail, "thresholds");
            get(t, "twopath", h.twopath, "thresholds");
            get(t, "twopath_floor", h.twopath_floor, "thresholds");
            get(t, "identity", h.identity, "thresholds");
            get(t, "identity_floor", h.identity_floor, "thresholds");
            get(t, "min_decay", h.min_decay, "thresholds");
            get(t, "decay_floor", h.decay_floor, "thresholds");
            get(t, "theta", h.theta, "thresholds");
            get(t, "decisive_theta", h.decisive_theta, "thresholds");
            get(t, "noise_floor", h.noise_floor, "thresholds");
            get(t, "tau", h.tau, "thresholds");
            get(t, "profile_theta", h.profile_theta, "thresholds");
        }
        if (j.contains("weights"))
        {
            const json& w = j["weights"];
            check_keys(w, "weights", {"class_s", "m"});
            get(w, "class_s", c.class_weight, "weights");
            get(w, "m", c.m_weights, "weights");
        }
        if (j.contains("sweep"))
        {
            const json& s = j["sweep"];
            check_keys(s, "sweep", {"p", "q", "sections", "radii"});
            get_exponents(s, "p", c.p, "sweep");
            get_exponents(s, "q", c.q, "sweep");
            get(s, "sections", c.sections, "sweep");
            get(s, "radii", c.radii, "sweep");
        }
        if (j.contains("samples"))
        {
            const json& s = j["samples"];
            check_keys(s, "samples", {"signals", "pairs", "pair_offset", "vectors"});
            get(s, "signals", c.signals, "samples");
            get(s, "pairs", c.pairs, "samples");
            get(s, "pair_offset", c.pair_offset, "samples");
            get(s, "vectors", c.vectors, "samples");
        }
        if (j.contains("expect"))
        {
            const json& e = j["expect"];
            check_keys(e, "expect", {"compact"});
            if (e.contains("compact") && !e["compact"].is_null())
            {
                if (!e["compact"].is_boolean())
                    throw ParameterError("expect.compact: true, false or null");
                c.expect_compact = e["compact"].get<bool>() ? 1 : 0;
            }
        }
        if (j.contains("output"))
        {
            const json& o = j["output"];
            check_keys(o, "output", {"dir", "matrices"});
            get(o, "dir", c.out, "output");
            get(o, "matrices", c.write_matrices, "output");
        }
        return c;
    }

    ExperimentConfig load_config(const std::string& path)
    {
        std::ifstream is(path);
        if (!is)
            throw IoError("cannot read config " + path);
        json j;
        try
        {
            is >> j;
        }
        catch (const json::parse_error& e)
        {
            throw IoError(path + ": " + e.what());
        }
        return from_json(j);
    }

    json to_json(const ExperimentConfig& c)
    {
        const Thresholds& h = c.thresholds;
        return {{"experiment", c.experiment},
                {"grid", {{"d", 1}, {"L", c.L}, {"N", c.N}}},
                {"lattice", {{"alpha", c.alpha}, {"beta", c.beta}, {"R", c.R}}},
                {"window", c.window},
                {"phase",
                 {{"preset", c.phase.preset}, {"A", c.phase.A}, {"B", c.phase.B}, {"C", c.phase.C}, {"x0", c.phase.x0},
                  {"eta0", c.phase.eta0}}},
                {"symbol",
                 {{"preset", c.symbol.preset}, {"width", c.symbol.width}, {"radius", c.symbol.radius},
                  {"steepness", c.symbol.steepness}, {"file", c.symbol.file}}},
                {"thresholds",
                 {{"reconstruction", h.reconstruction}, {"tight", h.tight}, {"signal_tail", h.signal_tail},
                  {"twopath", h.twopath}, {"twopath_floor", h.twopath_floor}, {"identity", h.identity},
                  {"identity_floor", h.identity_floor}, {"min_decay", h.min_decay}, {"decay_floor", h.decay_floor},
                  {"theta", h.theta}, {"decisive_theta", h.decisive_theta}, {"noise_floor", h.noise_floor},
                  {"tau", h.tau}, {"profile_theta", h.profile_theta}}},
                {"weights", {{"class_s", c.class_weight}, {"m", c.m_weights}}},
                {"sweep", {{"p", exponents_json(c.p)}, {"q", exponents_json(c.q)}, {"sections", c.sections}, {"radii", c.radii}}},
                {"samples", {{"signals", c.signals}, {"pairs", c.pairs}, {"pair_offset", c.pair_offset}, {"vectors", c.vectors}}},
                {"expect", {{"compact", c.expect_compact < 0 ? json(nullptr) : json(c.expect_compact == 1)}}},
                {"output", {{"dir", c.out}, {"matrices", c.write_matrices}}},
                {"seed", c.seed}};
    }

    json annotated_defaults()
    {
        json j = to_json(ExperimentConfig{});
        j["_doc"] = "tflab experiment config. Keys starting with '_' are ignored; omitted keys take these defaults.";
        j["experiment"] = "frames";
        j["grid"]["_doc"] = "periodic sample grid [-L/2, L/2) with N points; only d = 1";
        j["lattice"]["_doc"] = "alpha Z x beta Z truncated to |lambda|_inf <= R; alpha, beta on the grid";
        j["phase"]["_doc"] = "identity: x.eta; chirp: x.eta + x^2/2; quadratic: A x^2/2 + B x eta + C eta^2/2 + eta0 x - x0 eta";
        j["symbol"]["_doc"] = "one | zero | gaussian-bump(width) | compact-bump(radius, steepness) | "
                              "multiplier exp(-pi eta^2/width^2) | sampled(file: {Lx, Nx, Lw, Nw, re, im})";
        j["window"] = "gaussian";
        j["thresholds"]["_doc"] = "assertion tolerances; theta/decisive_theta/noise_floor drive the compactness diagnostic, "
                                  "tau the singular-value oracle, profile_theta the M0 profile";
        j["weights"]["_doc"] = "class weight v = <z>^class_s; sweep weights m = <z>^t for t in m";
        j["sweep"]["_doc"] = "exponents (numbers >= 1 or \"inf\"), oracle section sizes, truncation radii for 'mixed'";
        j["samples"]["_doc"] = "random signals (frames), identity pairs (psdo), random sequences (mixed)";
        j["expect"]["_doc"] = "optional expected compactness verdict (compactness, psdo); null skips the check";
        j["output"]["_doc"] = "output directory; matrices: also write *.bin Gabor matrices";
        return j;
    }

    void validate(const ExperimentConfig& c)
    {
        const auto& names = experiment_names();
        require(std::find(names.begin(), names.end(), c.experiment) != names.end(), "unknown experiment '" + c.experiment + "'");
        require(c.L > 0 && c.N > 0, "grid L and N must be positive");
        require(c.alpha > 0 && c.beta > 0 && c.R >= 0, "lattice steps positive, R >= 0");
        require(c.window == "gaussian" || c.window == "tight", "window is gaussian or tight");
        require(c.phase.preset == "identity" || c.phase.preset == "chirp" || c.phase.preset == "quadratic",
                "phase.preset is identity, chirp or quadratic");
        require(c.phase.B != 0, "phase.B must be invertible");
        const std::string& s = c.symbol.preset;
        require(s == "one" || s == "zero" || s == "gaussian-bump" || s == "compact-bump" || s == "multiplier" || s == "sampled",
                "unknown symbol preset '" + s + "'");
        require(c.symbol.width > 0 && c.symbol.radius > 0 && c.symbol.steepness > 0, "symbol width, radius, steepness > 0");
        if (s == "sampled")
        {
            require(!c.symbol.file.empty(), "symbol.file is required for the sampled preset");
            require(std::ifstream(c.symbol.file).good(), "symbol.file '" + c.symbol.file + "' does not exist");
        }
        for (Real p : c.p)
            require(p >= 1, "exponents must be >= 1");
        for (Real q : c.q)
            require(q >= 1, "exponents must be >= 1");
        require(!c.p.empty() && !c.q.empty(), "sweep.p and sweep.q must be non-empty");
        require(c.sections.size() >= 2, "at least two oracle sections");
        for (int n : c.sections)
            require(n > 0, "section sizes must be positive");
        for (Real t : c.m_weights)
            require(t >= 0 && t <= c.class_weight, "sweep weights need 0 <= t <= class_s");
        for (Real r : c.radii)
            require(r >= 0, "radii must be >= 0");
        require(c.signals > 0 && c.pairs > 0 && c.vectors > 0 && c.pair_offset >= 0, "sample counts must be positive");
        const Thresholds& h = c.thresholds;
        for (Real v : {h.reconstruction, h.tight, h.signal_tail, h.twopath, h.identity, h.theta, h.decisive_theta, h.tau,
                       h.profile_theta})
            require(v > 0, "thresholds must be positive");
        require(!c.out.empty(), "output.dir must be set");
    }

    PhaseSpec make_phase(const PhaseConfig& p)
    {
        if (p.preset == "identity")
            return PhaseSpec::from_quadratic(QuadraticPhase::identity(1), "identity");
        if (p.preset == "chirp")
            return PhaseSpec::from_quadratic(QuadraticPhase::chirp(1), "chirp");
        const auto m = [](Real v) { return RMatrix::Constant(1, 1, v); };
        const auto r = [](Real v) { return RVector::Constant(1, v); };
        return PhaseSpec::from_quadratic(QuadraticPhase(m(p.A), m(p.B), m(p.C), r(p.x0), r(p.eta0)), "quadratic");
    }

    Symbol make_symbol(const SymbolConfig& s)
    {
        if (s.preset == "one")
            return Symbol::one();
        if (s.preset == "zero")
            return Symbol::zero();
        if (s.preset == "gaussian-bump")
            return Symbol::gaussian_bump(s.width);
        if (s.preset == "compact-bump")
            return Symbol::compact_bump(s.radius, s.steepness);
        if (s.preset == "multiplier")
        {
            const Real w = s.width;
            return Symbol::multiplier([w](Real eta) { return Complex(std::exp(-kPi * eta * eta / (w * w))); });
        }
        std::ifstream is(s.file);
        if (!is)
            throw IoError("cannot read " + s.file);
        json j;
        is >> j;
        const Real Lx = j.at("Lx").get<Real>(), Lw = j.at("Lw").get<Real>();
        const long Nx = j.at("Nx").get<long>(), Nw = j.at("Nw").get<long>();
        PhaseSpaceFunction f(Lx, Nx, Lw, Nw);
        const json& re = j.at("re");
        const json im = j.contains("im") ? j.at("im") : json();
        if (!re.is_array() || static_cast<long>(re.size()) != Nx)
            throw IoError(s.file + ": 're' must have Nx rows");
        for (long i = 0; i < Nx; ++i)
        {
            if (static_cast<long>(re[i].size()) != Nw || (!im.is_null() && static_cast<long>(im[i].size()) != Nw))
                throw IoError(s.file + ": rows must have Nw entries");
            for (long k = 0; k < Nw; ++k)
                f.values()(i, k) = Complex(re[i][k].get<Real>(), im.is_null() ? 0.0 : im[i][k].get<Real>());
        }
        return Symbol::sampled(std::move(f), "sampled:" + s.file);
    }

    GaborSystem make_system(const ExperimentConfig& c, Real radius)
    {
        GaborSystem sys(gaussian_window(c.L, c.N), build_lattice(c.alpha, c.beta, 1, radius));
        return c.window == "tight" ? sys.with_window(tight_window(sys)) : sys;
    }
}  // namespace tflab::cli
