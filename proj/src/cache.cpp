#include "geodist/cache.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace geodist {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

DiscriminantData compute_discriminant_data(i64 d) {
    DiscriminantData out;
    out.d = Discriminant::of(d);
    out.group = class_group(out.d);
    out.pell = fundamental_pell(out.d);
    out.reg = regulator_from(out.pell, out.d);
    return out;
}

DiscriminantData DiscCache::load_file(i64 d) {
    const fs::path path = fs::path(dir_) / (std::to_string(d) + ".json");
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cache miss");
    ordered_json j = ordered_json::parse(in);
    if (j.value("schema_version", -1) != kSchemaVersion) throw std::runtime_error("cache schema mismatch");
    if (j.value("d", static_cast<i64>(0)) != d) throw std::runtime_error("cache d mismatch");

    DiscriminantData data;
    data.d = Discriminant::of(d);
    data.group.d = data.d;
    for (const auto& jc : j.at("cycles")) {
        ReductionCycle cyc;
        for (const auto& jf : jc) {
            QuadForm f;
            f.a = jf.at(0).get<i64>();
            f.b = jf.at(1).get<i64>();
            f.c = jf.at(2).get<i64>();
            cyc.forms.push_back(std::move(f));
        }
        data.group.cycles.push_back(std::move(cyc));
    }
    data.group.table = j.at("composition_table").get<std::vector<std::vector<int>>>();
    data.pell.t = BigInt(j.at("pell_t").get<std::string>());
    data.pell.u = BigInt(j.at("pell_u").get<std::string>());
    data.reg.regulator = j.at("regulator").get<double>();
    data.reg.period = j.at("period").get<double>();
    data.reg.has_norm_minus_one_unit = j.at("has_norm_minus_one_unit").get<bool>();
    return data;
}

void DiscCache::store_file(const DiscriminantData& data) {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["d"] = data.d.value;
    j["is_fundamental"] = data.d.is_fundamental;
    j["conductor"] = data.d.conductor;
    ordered_json cycles = ordered_json::array();
    for (const auto& cyc : data.group.cycles) {
        ordered_json jc = ordered_json::array();
        for (const auto& f : cyc.forms) {
            jc.push_back({f.a.convert_to<i64>(), f.b.convert_to<i64>(), f.c.convert_to<i64>()});
        }
        cycles.push_back(std::move(jc));
    }
    j["cycles"] = std::move(cycles);
    j["composition_table"] = data.group.table;
    j["pell_t"] = data.pell.t.str();
    j["pell_u"] = data.pell.u.str();
    j["regulator"] = data.reg.regulator;
    j["period"] = data.reg.period;
    j["has_norm_minus_one_unit"] = data.reg.has_norm_minus_one_unit;

    fs::create_directories(dir_);
    const fs::path final_path = fs::path(dir_) / (std::to_string(data.d.value) + ".json");
    const fs::path tmp_path = fs::path(dir_) / ("." + std::to_string(data.d.value) + ".json.tmp");
    {
        std::ofstream out(tmp_path, std::ios::trunc);
        out << j.dump() << '\n';
    }
    fs::rename(tmp_path, final_path); // last writer wins
}

DiscriminantData DiscCache::get(i64 d) {
    if (!enabled_) return compute_discriminant_data(d);
    {
        std::lock_guard<std::mutex> lock(mu_);
        try {
            return load_file(d);
        } catch (...) {
            // fall through to recompute
        }
    }
    DiscriminantData data = compute_discriminant_data(d);
    {
        std::lock_guard<std::mutex> lock(mu_);
        store_file(data);
    }
    return data;
}

CollectionProvider DiscCache::provider() {
    return [this](i64 d) {
        const DiscriminantData data = get(d);
        return build_full(data.group, data.reg);
    };
}

std::vector<i64> log_spaced_fundamental(i64 lo, i64 hi, int count) {
    if (lo < 5 || hi <= lo || count < 2) throw std::invalid_argument("log_spaced_fundamental: bad range");
    auto nearest_fundamental = [&](i64 target) -> i64 {
        for (i64 off = 0;; ++off) {
            for (const i64 cand : {target + off, target - off}) {
                if (cand < 5 || cand > hi * 2) continue;
                if (!is_discriminant(cand)) continue;
                if (Discriminant::of(cand).is_fundamental) return cand;
            }
            if (off > hi) throw std::logic_error("no fundamental discriminant near target");
        }
    };
    std::vector<i64> out;
    const double la = std::log(static_cast<double>(lo));
    const double lb = std::log(static_cast<double>(hi));
    for (int i = 0; i < count; ++i) {
        const double t = la + (lb - la) * static_cast<double>(i) / static_cast<double>(count - 1);
        i64 d = nearest_fundamental(static_cast<i64>(std::llround(std::exp(t))));
        // keep the list strictly increasing
        while (!out.empty() && d <= out.back()) {
            ++d;
            while (!(is_discriminant(d) && Discriminant::of(d).is_fundamental)) ++d;
        }
        out.push_back(d);
    }
    return out;
}

} // namespace geodist
