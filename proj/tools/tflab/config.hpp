#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "tflab/fio.hpp"
#include "tflab/gabor.hpp"
#include "tflab/types.hpp"

namespace tflab::cli
{
    using json = nlohmann::json;

    struct PhaseConfig
    {
        std::string preset = "chirp";  ///< identity | chirp | quadratic
        Real A = 0, B = 1, C = 0, x0 = 0, eta0 = 0;
    };

    struct SymbolConfig
    {
        std::string preset = "gaussian-bump";  ///< one | zero | gaussian-bump | compact-bump | multiplier | sampled
        Real width = 2;       ///< gaussian-bump and multiplier
        Real radius = 3;      ///< compact-bump
        Real steepness = 8;   ///< compact-bump
        std::string file;     ///< sampled: JSON {Lx, Nx, Lw, Nw, re, im}
    };

    struct Thresholds
    {
        Real reconstruction = 1e-6;
        Real tight = 1e-6;
        Real signal_tail = 1e-8;
        Real twopath = 1e-3;
        Real twopath_floor = 1e-8;
        Real identity = 1e-3;
        Real identity_floor = 1e-8;
        Real min_decay = 4;
        Real decay_floor = 1e-12;
        Real theta = 0.25;
        Real decisive_theta = 1e-3;
        Real noise_floor = 1e-10;
        Real tau = 0.25;
        Real profile_theta = 1e-3;
    };

    struct ExperimentConfig
    {
        std::string experiment = "frames";
        Real L = 16;
        long N = 512;
        Real alpha = 0.5, beta = 0.5, R = 5;
        std::string window = "gaussian";  ///< gaussian | tight
        PhaseConfig phase;
        SymbolConfig symbol;
        Thresholds thresholds;
        Real class_weight = 2;               ///< s of v = v_s
        std::vector<Real> m_weights = {0, 1}; ///< t of m = v_t in sweeps
        std::vector<Real> p = {1, 2, inf};
        std::vector<Real> q = {1, 2, inf};
        std::vector<int> sections = {5, 10, 15, 20};
        std::vector<Real> radii = {2, 3, 4, 5, 6};  ///< mixed: truncations scanned
        int signals = 20;
        int pairs = 200;
        int pair_offset = 4;
        int vectors = 100;
        int expect_compact = -1;  ///< compactness/psdo: -1 none, 0 non-compact, 1 compact
        bool write_matrices = false;
        unsigned seed = 1;
        std::string out = "out";
    };

    inline const std::vector<std::string>& experiment_names()
    {
        static const std::vector<std::string> names = {"frames", "decay", "twopath", "compactness", "psdo", "mixed"};
        return names;
    }

    /// Reads fields present in `j` over the defaults; keys starting with '_' are comments.
    /// Throws ParameterError on unknown keys or invalid values.
    ExperimentConfig from_json(const json& j);
    ExperimentConfig load_config(const std::string& path);
    json to_json(const ExperimentConfig& c);
    /// Default config with a "_doc" entry per section.
    json annotated_defaults();
    void validate(const ExperimentConfig& c);

    PhaseSpec make_phase(const PhaseConfig& p);
    Symbol make_symbol(const SymbolConfig& s);
    GaborSystem make_system(const ExperimentConfig& c, Real radius);
}  // namespace tflab::cli
