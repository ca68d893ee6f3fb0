#include "spiked/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "spiked/errors.hpp"

namespace spiked {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const json& config) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config.dump())));
    return buf;
}

std::string provenance_line(const std::string& hash) {
    return "# config=" + hash + " version=" + artifact_version + "\n";
}

json to_json(const SpikedModel& model) {
    json spikes = json::array();
    for (const Spike& s : model.spikes) spikes.push_back({{"value", s.value}, {"multiplicity", s.multiplicity}});
    return {{"N", model.N}, {"M", model.M}, {"gamma", model.gamma}, {"spikes", spikes}};
}

SpikedModel model_from_json(const json& j) {
    std::vector<Spike> spikes;
    if (j.contains("spikes"))
        for (const json& s : j.at("spikes")) spikes.push_back({s.at("value").get<double>(), s.value("multiplicity", 1)});
    const int N = j.at("N").get<int>();
    if (j.contains("M") && !j.at("M").is_null()) {
        SpikedModel m = SpikedModel::from_dimensions(N, j.at("M").get<int>(), spikes);
        if (j.contains("gamma") && !j.at("gamma").is_null() &&
            static_cast<int>(std::ceil(std::pow(j.at("gamma").get<double>(), 2) * N - 1e-9)) != m.M)
            throw DomainError("model: M is inconsistent with gamma");
        return m;
    }
    if (!j.contains("gamma") || j.at("gamma").is_null()) throw DomainError("model: need M or gamma");
    return SpikedModel::from_gamma(N, j.at("gamma").get<double>(), spikes);
}

std::string law_table_csv(const LawTable& table, const std::string& hash) {
    std::string out = provenance_line(hash);
    out += "family,k,x,value,nodes,est_error\n";
    const std::string fam = family_name(table.family), k = std::to_string(table.k), n = std::to_string(table.nodes);
    for (const LawTableRow& r : table.rows)
        out += fam + "," + k + "," + format_double(r.x) + "," + format_double(r.value) + "," + n + "," +
               format_double(r.error_estimate) + "\n";
    return out;
}

std::string samples_csv(const EnsembleResult& result, const SpikedModel& model, const std::string& hash) {
    const LawSpec lmin = scaling_for(model, Side::Min), lmax = scaling_for(model, Side::Max);
    std::string out = provenance_line(hash);
    out += "replicate,lambda_min,lambda_max,scaled_min,scaled_max\n";
    for (const ExtremePair& p : result.pairs)
        out += std::to_string(p.replicate) + "," + format_double(p.lambda_min) + "," + format_double(p.lambda_max) +
               "," + format_double(lmin.scaled(p.lambda_min, model.M)) + "," +
               format_double(lmax.scaled(p.lambda_max, model.M)) + "\n";
    return out;
}

json run_manifest(const EnsembleRun& run, const EnsembleResult& result, const std::string& hash, const json& inputs) {
    json failures = json::array();
    for (const ReplicateFailure& f : result.failures)
        failures.push_back({{"replicate", f.replicate}, {"reason", f.reason}});
    return {{"config_hash", hash},
            {"version", artifact_version},
            {"model", to_json(run.model)},
            {"gamma", run.model.gamma},
            {"seed", run.seed},
            {"replicates", run.replicates},
            {"completed", result.pairs.size()},
            {"failures", failures},
            {"inputs", inputs}};
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content, bool force) {
    if (!force && std::filesystem::exists(path))
        throw OutputExistsError("refusing to overwrite " + path.string() + " (use --force)");
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    // write to a sibling and rename so readers never see a partial file
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace spiked
