#pragma once

#include <string>

#include <json.hpp>

#include "tflab/fio.hpp"
#include "tflab/gabor.hpp"
#include "tflab/lattice.hpp"
#include "tflab/lattice_matrix.hpp"
#include "tflab/psdo.hpp"
#include "tflab/seqops.hpp"
#include "tflab/signal.hpp"

namespace tflab::io
{
    using json = nlohmann::json;

    /// Binary signal container: "TFLS", u32 version, i32 d, f64 L, i64 N, then
    /// interleaved re/im float64, all little-endian.
    void write_signal(const std::string& path, const SampledSignal& f);
    SampledSignal read_signal(const std::string& path);
    /// position, re, im, abs
    void write_signal_csv(const std::string& path, const SampledSignal& f);

    /// Binary matrix container: "TFLM", u32 version, lattice (alpha, beta, d, R),
    /// i64 rows, i64 cols, row-major interleaved re/im float64.
    void write_matrix(const std::string& path, const LatticeMatrix& M);
    LatticeMatrix read_matrix(const std::string& path);
    /// One line per entry: lambda, mu, |M|, and <chi(lambda) - mu> when chi is given.
    void write_matrix_csv(const std::string& path, const LatticeMatrix& M, const PhaseMap* chi = nullptr);

    json to_json(const TruncatedLattice& lat, const LatticeMap* psi = nullptr, const AdmissibilityReport* adm = nullptr);
    json to_json(const CompactnessVerdict& v, std::size_t head = 16);
    json to_json(const OracleVerdict& v, std::size_t head = 8);
    json to_json(const FrameBounds& fb);
    json to_json(const DecayFit& fit);
    json to_json(const IdentityCheck& chk);
    json to_json(const DecayProfile& prof);
    json to_json(const ClassReport& rep, std::size_t head = 16);

    /// 64-bit FNV-1a of a string, as 16 hex digits.
    std::string fnv1a_hex(const std::string& s);
}  // namespace tflab::io
