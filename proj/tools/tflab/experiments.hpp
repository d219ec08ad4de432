#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace tflab::cli
{
    /// Outcome of one experiment: results and assertions go into summary.json.
    struct Report
    {
        json results = json::object();
        json assertions = json::array();
        std::vector<std::string> files;

        /// Records `value <op> bound`; returns pass.
        bool check(const std::string& name, bool pass, json value, json bound);
        std::vector<std::string> failures() const;
    };

    /// Runs c.experiment, writing CSV (and optional .bin) files into `dir`.
    Report run_experiment(const ExperimentConfig& c, const std::string& dir);
}  // namespace tflab::cli
