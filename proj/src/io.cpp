#include "bcp/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

namespace bcp::io {

using nlohmann::json;

std::string fmt_double(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

namespace {

double number(const json& j, const char* key, double fallback, bool required = false)
{
    if (!j.contains(key)) {
        if (required) throw SpecError(std::string("measure field '") + key + "' is required");
        return fallback;
    }
    if (!j.at(key).is_number()) throw SpecError(std::string("measure field '") + key + "' must be a number");
    return j.at(key).get<double>();
}

}  // namespace

LambdaMeasure parse_measure(const json& j)
{
    if (!j.is_object()) throw SpecError("measure must be a JSON object");
    const double m0 = number(j, "m0", 0), m1 = number(j, "m1", 0);
    InteriorPart interior = InteriorZero{};
    if (j.contains("interior")) {
        const auto& in = j.at("interior");
        if (!in.is_object() || !in.contains("type") || !in.at("type").is_string())
            throw SpecError("interior must be an object with a string 'type'");
        const auto type = in.at("type").get<std::string>();
        if (type == "zero") {
        } else if (type == "uniform") {
            interior = UniformScaled{number(in, "c", 1)};
        } else if (type == "beta") {
            interior = BetaDensity{number(in, "a", 0, true), number(in, "b", 0, true), number(in, "mass", 1)};
        } else if (type == "atoms") {
            if (!in.contains("atoms") || !in.at("atoms").is_array()) throw SpecError("atoms interior needs an 'atoms' array");
            Atoms a;
            for (const auto& e : in.at("atoms")) {
                if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                    throw SpecError("each atom is a pair [location, mass]");
                a.atoms.push_back({e[0].get<double>(), e[1].get<double>()});
            }
            interior = std::move(a);
        } else {
            throw SpecError("unknown interior type '" + type + "'");
        }
    }
    try {
        return LambdaMeasure(m0, m1, std::move(interior));
    } catch (const DomainError& e) {
        throw SpecError(std::string("invalid measure: ") + e.what());
    }
}

LambdaMeasure load_measure(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open measure file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw SpecError("measure file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_measure(j);
}

json measure_to_json(const LambdaMeasure& m)
{
    json j{{"m0", m.m0()}, {"m1", m.m1()}};
    std::visit(
        [&](const auto& part) {
            using T = std::decay_t<decltype(part)>;
            if constexpr (std::is_same_v<T, InteriorZero>) {
                j["interior"] = {{"type", "zero"}};
            } else if constexpr (std::is_same_v<T, UniformScaled>) {
                j["interior"] = {{"type", "uniform"}, {"c", part.c}};
            } else if constexpr (std::is_same_v<T, BetaDensity>) {
                j["interior"] = {{"type", "beta"}, {"a", part.a}, {"b", part.b}, {"mass", part.total_mass}};
            } else if constexpr (std::is_same_v<T, Atoms>) {
                json arr = json::array();
                for (const auto& a : part.atoms) arr.push_back({a.x, a.mass});
                j["interior"] = {{"type", "atoms"}, {"atoms", arr}};
            } else {
                j["interior"] = {{"type", "custom"}, {"label", part.label}, {"e0", part.e0}, {"e1", part.e1}};
            }
        },
        m.interior());
    return j;
}

json params_json(const ModelParams& p)
{
    return {{"sigma", p.sigma}, {"theta0", p.theta0}, {"theta1", p.theta1}};
}

json params_json(const MoranParams& p) { return {{"N", p.N}, {"s", p.s}, {"u0", p.u0}, {"u1", p.u1}}; }

json pmf_diagnostics(const StationaryPmf& pmf)
{
    return {{"K", pmf.truncation_K},
            {"residual", pmf.residual},
            {"tail_bound", pmf.tail_bound},
            {"solver_tag", to_string(pmf.solver_tag)},
            {"warnings", pmf.warnings}};
}

void write_pmf_csv(std::ostream& os, const StationaryPmf& pmf)
{
    const auto a = pmf.tails();
    os << "n,p_n,a_n\n";
    for (int n = 1; n <= pmf.size(); ++n)
        os << n << ',' << fmt_double(pmf.p(n)) << ',' << fmt_double(n < int(a.size()) ? a[n] : 0.0) << '\n';
}

void write_path_csv(std::ostream& os, const sim::JumpPath& path)
{
    os << "state,holding_time\n";
    for (std::size_t i = 0; i < path.states.size(); ++i)
        os << path.states[i] << ',' << fmt_double(path.holding_times[i]) << '\n';
}

void write_occupancy_csv(std::ostream& os, const sim::OccupancyEstimate& occ)
{
    os << "state,weight\n";
    for (const auto& [k, w] : occ.weights) os << k << ',' << fmt_double(w) << '\n';
}

void write_atoms_csv(std::ostream& os, const AtomicMeasure& mu)
{
    os << "k,location,mass\n";
    for (const auto& a : mu.atoms) os << a.k << ',' << fmt_double(a.x) << ',' << fmt_double(a.mass) << '\n';
}

void write_moments_csv(std::ostream& os, const MomentSequence& w)
{
    os << "n,w_n\n";
    for (std::size_t n = 0; n < w.w.size(); ++n) os << n << ',' << fmt_double(w.w[n]) << '\n';
}

void write_generating_csv(std::ostream& os, const BsGenerating& g)
{
    os << "s,w\n";
    for (std::size_t i = 0; i < g.s.size(); ++i) os << fmt_double(g.s[i]) << ',' << fmt_double(g.values[i]) << '\n';
}

}  // namespace bcp::io
