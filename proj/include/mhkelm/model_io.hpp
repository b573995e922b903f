#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <variant>

#include <json.hpp>

#include "mhkelm/elm.hpp"
#include "mhkelm/error.hpp"
#include "mhkelm/kelm.hpp"

namespace mhkelm {

inline constexpr int kModelFormatVersion = 1;

using Model = std::variant<KelmModel, ElmModel>;

namespace detail {

inline nlohmann::json matrix_rows(const Eigen::MatrixXd& m) {
    auto rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        auto r = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        rows.push_back(std::move(r));
    }
    return rows;
}

inline Eigen::MatrixXd matrix_from(const nlohmann::json& rows, Eigen::Index r, Eigen::Index c, const char* what) {
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != r)
        throw ParseError(std::string("model file: '") + what + "' should have " + std::to_string(r) + " rows");
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c)
            throw ParseError(std::string("model file: '") + what + "' row " + std::to_string(i) + " should have " +
                             std::to_string(c) + " values");
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
    return m;
}

inline nlohmann::json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline Eigen::VectorXd vector_from(const nlohmann::json& j, Eigen::Index n, const char* what) {
    const auto v = j.get<std::vector<double>>();
    if (static_cast<Eigen::Index>(v.size()) != n)
        throw ParseError(std::string("model file: '") + what + "' should have " + std::to_string(n) + " values");
    return Eigen::Map<const Eigen::VectorXd>(v.data(), n);
}

inline nlohmann::json kernel_json(const KernelSpec& s) {
    nlohmann::json k{{"family", std::string(family_name(s.family))}};
    switch (s.family) {
    case KernelFamily::MexicanHatTI: k["a"] = s.a; break;
    case KernelFamily::MexicanHatDot: k["a"] = s.a; k["c"] = s.c_translate; break;
    case KernelFamily::Gauss: k["sigma"] = s.sigma; break;
    case KernelFamily::Poly: k["degree"] = s.degree; break;
    }
    return k;
}

inline KernelSpec kernel_from(const nlohmann::json& k) {
    KernelSpec s;
    s.family = parse_family(k.at("family").get<std::string>());
    s.a = k.value("a", 1.0);
    s.sigma = k.value("sigma", 1.0);
    s.degree = k.value("degree", 2);
    s.c_translate = k.value("c", 0.0);
    s.validate();
    return s;
}

template <typename M>
void write_common(nlohmann::json& j, const M& m) {
    j["C"] = m.C;
    j["M"] = m.classes.size();
    j["classes"] = m.classes;
    j["label_map"] = m.class_names;
    j["norm_stats"] = {{"min", vector_json(m.norm.min)}, {"max", vector_json(m.norm.max)}};
}

template <typename M>
void read_common(const nlohmann::json& j, M& m, Eigen::Index dim) {
    m.C = j.at("C").get<double>();
    m.classes = j.at("classes").get<std::vector<int>>();
    m.class_names = j.value("label_map", std::vector<std::string>{});
    if (j.at("M").get<std::size_t>() != m.classes.size()) throw ParseError("model file: M does not match classes");
    if (!m.class_names.empty() && m.class_names.size() != m.classes.size())
        throw ParseError("model file: label_map length does not match classes");
    m.norm.min = vector_from(j.at("norm_stats").at("min"), dim, "norm_stats.min");
    m.norm.max = vector_from(j.at("norm_stats").at("max"), dim, "norm_stats.max");
}

} // namespace detail

// Self-describing JSON. Doubles are written in shortest round-trip form, so
// reloading reproduces every value bit for bit.
inline nlohmann::json model_to_json(const Model& model) {
    nlohmann::json j{{"format", "mhkelm-model"}, {"format_version", kModelFormatVersion}};
    if (const auto* k = std::get_if<KelmModel>(&model)) {
        j["algo"] = "kelm";
        j["kernel"] = detail::kernel_json(k->spec);
        j["D"] = k->x_train.cols();
        j["N"] = k->x_train.rows();
        detail::write_common(j, *k);
        j["x_train"] = detail::matrix_rows(k->x_train);
        j["coef"] = detail::matrix_rows(k->coef);
    } else {
        const auto& e = std::get<ElmModel>(model);
        j["algo"] = "elm";
        j["activation"] = "sigmoid";
        j["D"] = e.layer.input_dim();
        j["L"] = e.layer.width();
        detail::write_common(j, e);
        j["W"] = detail::matrix_rows(e.layer.W);
        j["b"] = detail::vector_json(e.layer.b);
        j["beta"] = detail::matrix_rows(e.beta);
    }
    return j;
}

inline Model model_from_json(const nlohmann::json& j) {
    try {
        if (j.value("format", std::string{}) != "mhkelm-model") throw ParseError("model file: not an mhkelm model");
        const int version = j.at("format_version").get<int>();
        if (version != kModelFormatVersion)
            throw ParseError("model file: unsupported format_version " + std::to_string(version));
        const auto algo = j.at("algo").get<std::string>();
        const auto D = j.at("D").get<Eigen::Index>();
        const auto M = j.at("M").get<Eigen::Index>();
        if (algo == "kelm") {
            KelmModel k;
            k.spec = detail::kernel_from(j.at("kernel"));
            const auto N = j.at("N").get<Eigen::Index>();
            detail::read_common(j, k, D);
            k.x_train = detail::matrix_from(j.at("x_train"), N, D, "x_train");
            k.coef = detail::matrix_from(j.at("coef"), N, M, "coef");
            return k;
        }
        if (algo == "elm") {
            ElmModel e;
            const auto L = j.at("L").get<Eigen::Index>();
            detail::read_common(j, e, D);
            e.layer.W = detail::matrix_from(j.at("W"), D, L, "W");
            e.layer.b = detail::vector_from(j.at("b"), L, "b");
            e.beta = detail::matrix_from(j.at("beta"), L, M, "beta");
            return e;
        }
        throw ParseError("model file: unknown algo '" + algo + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
}

// Writes to a sibling temp file and renames, so readers never see a partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        out << contents;
        out.flush();
        if (!out) {
            std::filesystem::remove(tmp);
            throw ConfigError("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

inline void save_model(const Model& model, const std::filesystem::path& path) {
    write_file_atomic(path, model_to_json(model).dump(1) + "\n");
}

inline Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("model file " + path.string() + ": " + e.what());
    }
    return model_from_json(j);
}

} // namespace mhkelm
