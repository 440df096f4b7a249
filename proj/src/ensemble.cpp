#include "iralat/ensemble.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace iralat {

namespace {

void check_dist(const std::map<int, double>& d, int min_key, const char* name) {
    double sum = 0.0;
    for (const auto& [k, v] : d) {
        if (k < min_key)
            throw std::invalid_argument(std::string(name) + ": degree below minimum");
        if (v < 0.0)
            throw std::invalid_argument(std::string(name) + ": negative fraction");
        sum += v;
    }
    // published tables carry ~6 decimals, so allow small round-off
    if (std::abs(sum - 1.0) > 1e-4)
        throw std::invalid_argument(std::string(name) + ": does not sum to 1");
}

void renormalize(std::map<int, double>& d) {
    double sum = 0.0;
    for (const auto& [k, v] : d) sum += v;
    for (auto& [k, v] : d) v /= sum;
}

std::map<int, double> edge_to_node(const std::map<int, double>& edge) {
    // f_i proportional to alpha_i / i
    std::map<int, double> node;
    double z = 0.0;
    for (const auto& [i, a] : edge) z += a / i;
    for (const auto& [i, a] : edge) node[i] = (a / i) / z;
    return node;
}

}  // namespace

DegreeDistribution DegreeDistribution::from_edge(
    const std::map<int, double>& edge_vn, const std::map<int, double>& edge_cn) {
    check_dist(edge_vn, 2, "edge_vn");
    check_dist(edge_cn, 1, "edge_cn");
    DegreeDistribution d;
    d.edge_vn = edge_vn;
    d.edge_cn = edge_cn;
    renormalize(d.edge_vn);
    renormalize(d.edge_cn);
    d.node_vn = edge_to_node(d.edge_vn);
    d.node_cn = edge_to_node(d.edge_cn);
    return d;
}

void DegreeDistribution::validate() const {
    check_dist(node_vn, 2, "node_vn");
    check_dist(node_cn, 1, "node_cn");
    check_dist(edge_vn, 2, "edge_vn");
    check_dist(edge_cn, 1, "edge_cn");
}

CodeEnsemble make_ensemble(const std::map<int, double>& edge_vn,
                           const std::map<int, double>& edge_cn,
                           const PartitionTable& partition, int N) {
    if (N < 1) throw std::invalid_argument("make_ensemble: N < 1");
    CodeEnsemble e;
    e.degree = DegreeDistribution::from_edge(edge_vn, edge_cn);
    e.partition = &partition;
    e.N = N;

    double inv_vn = 0.0, inv_cn = 0.0;
    for (const auto& [i, a] : edge_vn) inv_vn += a / i;
    for (const auto& [j, b] : edge_cn) inv_cn += b / j;
    const double ratio = inv_vn / inv_cn;  // K/N
    e.K = static_cast<int>(std::lround(ratio * N));
    if (e.K < 1 || e.K > N)
        throw std::invalid_argument("make_ensemble: distributions give K outside [1,N]");
    if (std::abs(static_cast<double>(e.K) / N - ratio) > 0.01)
        throw std::invalid_argument("make_ensemble: K/N not realizable within 1%");

    // mean combiner inputs per check node
    double mean_j = 0.0;
    for (const auto& [j, b] : e.degree.node_cn) mean_j += j * b;
    e.L = static_cast<long>(std::lround(mean_j * N));

    const double bits = std::log2(static_cast<double>(partition.size()));
    const double n_complex = (partition.ring == Ring::hurwitz) ? 2.0 : 1.0;
    e.design_rate = ratio * bits / n_complex;
    return e;
}

std::string CodeEnsemble::to_json() const {
    nlohmann::json j;
    auto dump = [](const std::map<int, double>& m) {
        nlohmann::json o = nlohmann::json::object();
        for (const auto& [k, v] : m) o[std::to_string(k)] = v;
        return o;
    };
    j["edge_vn"] = dump(degree.edge_vn);
    j["edge_cn"] = dump(degree.edge_cn);
    j["node_vn"] = dump(degree.node_vn);
    j["node_cn"] = dump(degree.node_cn);
    j["K"] = K;
    j["N"] = N;
    j["L"] = L;
    j["design_rate"] = design_rate;
    j["M"] = partition ? partition->size() : 0;
    return j.dump(2);
}

const Preset& preset_by_rate(const std::string& rate) {
    static const Preset r34{
        {{2, 0.288274}, {3, 0.265333}, {7, 0.188119}, {13, 0.123885}, {15, 0.134389}},
        {{1, 0.055556}, {3, 0.944444}},
        4.47};
    static const Preset r23{
        {{2, 0.240605}, {3, 0.231215}, {7, 0.081754}, {8, 0.190942},
         {19, 0.175951}, {20, 0.079534}},
        {{1, 0.053861}, {3, 0.946139}},
        3.31};
    static const Preset r12{
        {{2, 0.163689}, {3, 0.170788}, {8, 0.120858}, {9, 0.148837},
         {19, 0.038618}, {20, 0.088323}, {34, 0.268886}},
        {{1, 0.054328}, {3, 0.945672}},
        1.26};
    if (rate == "3/4") return r34;
    if (rate == "2/3") return r23;
    if (rate == "1/2") return r12;
    throw std::invalid_argument("unknown preset rate: " + rate);
}

}  // namespace iralat
