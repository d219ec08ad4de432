#include "tflab/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace tflab::io
{
    namespace
    {
        static_assert(std::endian::native == std::endian::little, "containers are written in host order");

        constexpr std::uint32_t kVersion = 1;

        template <class T>
        void put(std::ostream& os, T v)
        {
            os.write(reinterpret_cast<const char*>(&v), sizeof v);
        }

        template <class T>
        T get(std::istream& is)
        {
            T v{};
            if (!is.read(reinterpret_cast<char*>(&v), sizeof v))
                throw IoError("truncated container");
            return v;
        }

        std::ofstream open_out(const std::string& path, bool binary)
        {
            std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
            if (!os)
                throw IoError("cannot write " + path);
            return os;
        }

        std::ifstream open_in(const std::string& path, const char magic[4])
        {
            std::ifstream is(path, std::ios::binary);
            if (!is)
                throw IoError("cannot read " + path);
            char m[4];
            if (!is.read(m, 4) || std::memcmp(m, magic, 4) != 0)
                throw IoError(path + ": not a " + std::string(magic, 4) + " container");
            if (get<std::uint32_t>(is) != kVersion)
                throw IoError(path + ": unsupported container version");
            return is;
        }

        void put_complex(std::ostream& os, Complex z)
        {
            put(os, z.real());
            put(os, z.imag());
        }

        Complex get_complex(std::istream& is)
        {
            const Real re = get<Real>(is);
            return {re, get<Real>(is)};
        }

        json coords(const IVector& v) { return std::vector<int>(v.data(), v.data() + v.size()); }
    }  // namespace

    void write_signal(const std::string& path, const SampledSignal& f)
    {
        auto os = open_out(path, true);
        os.write("TFLS", 4);
        put(os, kVersion);
        put<std::int32_t>(os, f.d());
        put<double>(os, f.L());
        put<std::int64_t>(os, f.N());
        for (Eigen::Index i = 0; i < f.size(); ++i)
            put_complex(os, f[i]);
    }

    SampledSignal read_signal(const std::string& path)
    {
        auto is = open_in(path, "TFLS");
        const int d = get<std::int32_t>(is);
        const Real L = get<double>(is);
        const Eigen::Index N = get<std::int64_t>(is);
        SampledSignal f(d, L, N);
        for (Eigen::Index i = 0; i < f.size(); ++i)
            f[i] = get_complex(is);
        return f;
    }

    void write_signal_csv(const std::string& path, const SampledSignal& f)
    {
        if (f.d() != 1)
            throw UnsupportedError("CSV export is for d = 1 signals");
        auto os = open_out(path, false);
        os << std::setprecision(17) << "t,re,im,abs\n";
        for (Eigen::Index j = 0; j < f.N(); ++j)
            os << f.position(j) << ',' << f[j].real() << ',' << f[j].imag() << ',' << std::abs(f[j]) << '\n';
    }

    void write_matrix(const std::string& path, const LatticeMatrix& M)
    {
        auto os = open_out(path, true);
        os.write("TFLM", 4);
        put(os, kVersion);
        const Lattice& b = M.lattice.base();
        put<double>(os, b.alpha);
        put<double>(os, b.beta);
        put<std::int32_t>(os, b.d);
        put<double>(os, M.lattice.radius());
        put<std::int64_t>(os, M.entries.rows());
        put<std::int64_t>(os, M.entries.cols());
        for (Eigen::Index r = 0; r < M.entries.rows(); ++r)
            for (Eigen::Index c = 0; c < M.entries.cols(); ++c)
                put_complex(os, M.entries(r, c));
    }

    LatticeMatrix read_matrix(const std::string& path)
    {
        auto is = open_in(path, "TFLM");
        const Real alpha = get<double>(is), beta = get<double>(is);
        const int d = get<std::int32_t>(is);
        const Real R = get<double>(is);
        const auto rows = get<std::int64_t>(is), cols = get<std::int64_t>(is);
        TruncatedLattice lat(Lattice(alpha, beta, d), R);
        if (rows != lat.size() || cols != lat.size())
            throw IoError(path + ": matrix size does not match its lattice descriptor");
        CMatrix a(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c)
                a(r, c) = get_complex(is);
        return LatticeMatrix(lat, std::move(a));
    }

    void write_matrix_csv(const std::string& path, const LatticeMatrix& M, const PhaseMap* chi)
    {
        const TruncatedLattice& lat = M.lattice;
        const int n = 2 * lat.d();
        auto os = open_out(path, false);
        os << std::setprecision(12);
        for (int i = 0; i < n; ++i)
            os << "lambda" << i << ',';
        for (int i = 0; i < n; ++i)
            os << "mu" << i << ',';
        os << "abs" << (chi ? ",bracket\n" : "\n");
        for (Eigen::Index l = 0; l < lat.size(); ++l)
        {
            const RVector pl = lat.point(l);
            const RVector img = chi ? (*chi)(pl) : pl;
            for (Eigen::Index m = 0; m < lat.size(); ++m)
            {
                const RVector pm = lat.point(m);
                for (int i = 0; i < n; ++i)
                    os << pl[i] << ',';
                for (int i = 0; i < n; ++i)
                    os << pm[i] << ',';
                os << std::abs(M.entries(m, l));
                if (chi)
                    os << ',' << std::sqrt(1 + (img - pm).squaredNorm());
                os << '\n';
            }
        }
    }

    json to_json(const TruncatedLattice& lat, const LatticeMap* psi, const AdmissibilityReport* adm)
    {
        const Lattice& b = lat.base();
        json j = {{"alpha", b.alpha}, {"beta", b.beta}, {"d", b.d}, {"R", lat.radius()}, {"size", lat.size()}};
        json pts = json::array();
        for (Eigen::Index k = 0; k < lat.size(); ++k)
            pts.push_back(coords(lat.coords(k)));
        j["points"] = std::move(pts);
        if (psi)
        {
            json from = json::array(), to = json::array();
            for (Eigen::Index k = 0; k < lat.size(); ++k)
            {
                from.push_back(coords(lat.coords(k)));
                to.push_back(coords(psi->target(k)));
            }
            j["psi"] = json::array({from, to});
        }
        if (adm)
        {
            json offs = json::array();
            for (const IVector& k : adm->offset_set)
                offs.push_back(coords(k));
            j["offsets"] = std::move(offs);
            j["admissible"] = adm->accepted;
            j["reason"] = adm->reason;
            j["M"] = adm->M;
            j["M1"] = adm->M1;
        }
        return j;
    }

    json to_json(const CompactnessVerdict& v, std::size_t head)
    {
        // Worst diagonals first; the full list runs into the thousands.
        std::vector<const GammaTail*> order;
        for (const GammaTail& g : v.per_gamma)
            order.push_back(&g);
        std::stable_sort(order.begin(), order.end(), [](const GammaTail* a, const GammaTail* b) { return a->ratio > b->ratio; });
        json per = json::array();
        for (std::size_t i = 0; i < std::min(head, order.size()); ++i)
        {
            const GammaTail& g = *order[i];
            per.push_back({{"gamma", coords(g.gamma)}, {"sup", g.sup}, {"tails", g.tails}, {"ratio", g.ratio}, {"pass", g.pass}});
        }
        return {{"radii", v.radii},
                {"theta", v.theta},
                {"scale", v.scale},
                {"judged", v.per_gamma.size()},
                {"worst", std::move(per)},
                {"worst_ratio", v.worst_ratio},
                {"decisive", v.decisive},
                {"verdict", v.verdict()}};
    }

    json to_json(const OracleVerdict& v, std::size_t head)
    {
        json secs = json::array();
        for (const SectionSpectrum& s : v.sections)
        {
            std::vector<Real> h(s.svals.data(), s.svals.data() + std::min<Eigen::Index>(s.svals.size(), static_cast<Eigen::Index>(head)));
            secs.push_back({{"n", s.n}, {"index_radius", s.index_radius}, {"count_above", s.count_above}, {"svals_head", h}});
        }
        return {{"oracle", std::move(secs)}, {"verdict", v.verdict()}};
    }

    json to_json(const FrameBounds& fb)
    {
        return {{"A", fb.A}, {"B", fb.B}, {"ratio", fb.ratio()}, {"probe_dim", fb.probe_dim}};
    }

    json to_json(const DecayFit& fit)
    {
        return {{"C", fit.C},           {"s", fit.s},
                {"log_C_ls", fit.log_C_ls}, {"residual_rms", fit.residual_rms},
                {"used", fit.used},     {"bucket_lo", fit.bucket_lo},
                {"envelope", fit.envelope}, {"envelope_monotone", fit.envelope_monotone}};
    }

    json to_json(const IdentityCheck& chk)
    {
        return {{"pairs", chk.pairs},
                {"compared", chk.compared},
                {"max_dev", chk.max_dev},
                {"worst_pair", {{"lambda", coords(chk.worst.lambda)}, {"mu", coords(chk.worst.mu)}}}};
    }

    json to_json(const DecayProfile& prof)
    {
        return {{"radii", prof.radii}, {"tails", prof.tails}, {"theta", prof.theta}, {"ratio", prof.ratio},
                {"verdict", prof.consistent ? "M0-consistent" : "not M0-consistent"}};
    }

    json to_json(const ClassReport& rep, std::size_t head)
    {
        std::vector<const ClassTerm*> order;
        for (const ClassTerm& t : rep.terms)
            order.push_back(&t);
        std::stable_sort(order.begin(), order.end(), [](const ClassTerm* a, const ClassTerm* b) { return a->phi > b->phi; });
        json terms = json::array();
        for (std::size_t i = 0; i < std::min(head, order.size()); ++i)
            terms.push_back({{"gamma", coords(order[i]->gamma)}, {"sup", order[i]->sup}, {"phi", order[i]->phi}});
        return {{"total", rep.total}, {"tail", rep.tail}, {"diagonals", rep.terms.size()}, {"largest", std::move(terms)}};
    }

    std::string fnv1a_hex(const std::string& s)
    {
        std::uint64_t h = 14695981039346656037ull;
        for (unsigned char c : s)
        {
            h ^= c;
            h *= 1099511628211ull;
        }
        std::ostringstream os;
        os << std::hex << std::setw(16) << std::setfill('0') << h;
        return os.str();
    }
}  // namespace tflab::io
