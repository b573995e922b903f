#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include <json.hpp>

#include "mhkelm/data.hpp"
#include "mhkelm/error.hpp"

#ifndef MHKELM_DEFAULT_REGISTRY
#define MHKELM_DEFAULT_REGISTRY "data/registry.json"
#endif

namespace mhkelm {

// Named dataset: file location, parsing options and its default split sizes.
struct RegistryEntry {
    std::string name;
    std::filesystem::path path; // resolved against the registry's directory
    LabelColumn label;
    CsvOptions csv;
    std::size_t train_count = 0;
    std::size_t test_count = 0;
    std::string note;

    SplitPlan plan(std::uint64_t seed) const { return {train_count, test_count, seed}; }
    bool available() const { return std::filesystem::exists(path); }
};

struct Registry {
    std::filesystem::path file;
    std::map<std::string, RegistryEntry> entries;

    const RegistryEntry& at(const std::string& name) const {
        const auto it = entries.find(name);
        if (it == entries.end()) throw ConfigError("dataset '" + name + "' is not in registry " + file.string());
        return it->second;
    }

    Dataset load(const std::string& name) const {
        const auto& e = at(name);
        if (!e.available())
            throw ConfigError("dataset '" + name + "' is registered but " + e.path.string() + " does not exist");
        Dataset ds = load_csv(e.path, e.label, e.csv);
        ds.name = name;
        return ds;
    }
};

// MHKELM_REGISTRY overrides the compiled-in default.
inline std::filesystem::path default_registry_path() {
    if (const char* env = std::getenv("MHKELM_REGISTRY"); env && *env) return env;
    return MHKELM_DEFAULT_REGISTRY;
}

inline Registry load_registry(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open dataset registry " + file.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("registry " + file.string() + ": " + e.what());
    }
    Registry reg;
    reg.file = file;
    const auto dir = file.parent_path();
    try {
        for (const auto& [name, v] : j.at("datasets").items()) {
            RegistryEntry e;
            e.name = name;
            e.path = dir / v.at("path").get<std::string>();
            const auto& lc = v.at("label_col");
            e.label = lc.is_number_integer() ? LabelColumn::at(lc.get<int>()) : LabelColumn::named(lc.get<std::string>());
            if (v.contains("header")) e.csv.has_header = v["header"].get<bool>();
            if (v.contains("delimiter")) {
                const auto d = v["delimiter"].get<std::string>();
                e.csv.delimiter = d == "whitespace" ? ' ' : d.at(0);
            }
            e.csv.categorical = v.value("categorical", std::vector<int>{});
            e.csv.drop = v.value("drop", std::vector<int>{});
            if (v.contains("label_bins")) {
                const auto& b = v["label_bins"];
                e.csv.label_bin_edges = b.value("edges", std::vector<double>{});
                e.csv.label_quantile_bins = b.value("quantiles", 0);
            }
            e.train_count = v.at("train").get<std::size_t>();
            e.test_count = v.at("test").get<std::size_t>();
            e.note = v.value("note", std::string{});
            reg.entries.emplace(name, std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("registry " + file.string() + ": " + e.what());
    }
    return reg;
}

} // namespace mhkelm
