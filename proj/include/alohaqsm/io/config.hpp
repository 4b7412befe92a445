#ifndef ALOHAQSM_IO_CONFIG_HPP
#define ALOHAQSM_IO_CONFIG_HPP

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include <alohaqsm/admm.hpp>
#include <alohaqsm/forward.hpp>
#include <alohaqsm/phantom.hpp>
#include <alohaqsm/sweep.hpp>

///
/// \file config.hpp
///
/// JSON forms of the pipeline configuration types. Missing keys keep their
/// defaults; unknown shape kinds and malformed arrays raise IoError.
///
namespace alohaqsm::io
{

using nlohmann::json;

namespace detail
{

inline Vec3 vec3(const json& j, const char* what)
{
    auto v = j.get<std::vector<double>>();
    if (v.size() != 3)
        throw IoError(std::string(what) + " must have three entries");
    return {v[0], v[1], v[2]};
}

inline std::string kind_name(ShapeKind k)
{
    switch (k) {
    case ShapeKind::ellipsoid: return "ellipsoid";
    case ShapeKind::sphere: return "sphere";
    case ShapeKind::cylinder: return "cylinder";
    }
    return "?";
}

inline ShapeKind parse_kind(const std::string& s)
{
    if (s == "ellipsoid")
        return ShapeKind::ellipsoid;
    if (s == "sphere")
        return ShapeKind::sphere;
    if (s == "cylinder")
        return ShapeKind::cylinder;
    throw IoError("unknown shape kind '" + s + "'");
}

template <class F>
auto guarded(const char* what, F&& f)
{
    try {
        return f();
    } catch (const json::exception& e) {
        throw IoError(std::string(what) + ": " + e.what());
    }
}

} // namespace detail

inline json to_json(const Shape& s)
{
    json j{{"kind", detail::kind_name(s.kind)}, {"name", s.name}, {"center", s.center}, {"chi_ppm", s.chi_ppm}};
    if (s.kind == ShapeKind::ellipsoid)
        j["semi_axes"] = s.extent;
    else
        j["radius"] = s.extent[0];
    if (s.kind == ShapeKind::cylinder) {
        j["length"] = s.length;
        j["axis"]   = s.axis;
    }
    return j;
}

inline Shape shape_from_json(const json& j)
{
    return detail::guarded("shape", [&] {
        Shape s;
        s.kind    = detail::parse_kind(j.at("kind").get<std::string>());
        s.name    = j.value("name", std::string());
        s.center  = detail::vec3(j.at("center"), "center");
        s.chi_ppm = j.at("chi_ppm").get<double>();
        if (s.kind == ShapeKind::ellipsoid)
            s.extent = detail::vec3(j.at("semi_axes"), "semi_axes");
        else {
            const double r = j.at("radius").get<double>();
            s.extent       = {r, r, r};
        }
        if (s.kind == ShapeKind::cylinder) {
            s.length = j.at("length").get<double>();
            s.axis   = detail::vec3(j.at("axis"), "axis");
        }
        return s;
    });
}

inline json to_json(const PhantomSpec& p)
{
    json shapes = json::array();
    for (const auto& s : p.shapes)
        shapes.push_back(to_json(s));
    return {{"dims", {p.dims.nx, p.dims.ny, p.dims.nz}},
            {"voxel_size_mm", {p.voxel.dx, p.voxel.dy, p.voxel.dz}},
            {"background_ppm", p.background_ppm},
            {"shapes", shapes}};
}

/// The string "default" selects default_brain_like_spec().
inline PhantomSpec phantom_from_json(const json& j)
{
    if (j.is_string()) {
        if (j.get<std::string>() == "default")
            return default_brain_like_spec();
        throw IoError("phantom: unknown preset '" + j.get<std::string>() + "'");
    }
    auto spec = detail::guarded("phantom", [&] {
        PhantomSpec p;
        if (j.contains("dims")) {
            auto d = j.at("dims").get<std::vector<long long>>();
            if (d.size() != 3 || d[0] <= 0 || d[1] <= 0 || d[2] <= 0)
                throw IoError("phantom: dims must be three positive integers");
            p.dims = {std::size_t(d[0]), std::size_t(d[1]), std::size_t(d[2])};
        }
        if (j.contains("voxel_size_mm")) {
            auto v  = detail::vec3(j.at("voxel_size_mm"), "voxel_size_mm");
            p.voxel = {v[0], v[1], v[2]};
        }
        p.background_ppm = j.value("background_ppm", 0.0);
        if (j.contains("shapes"))
            for (const auto& s : j.at("shapes"))
                p.shapes.push_back(shape_from_json(s));
        return p;
    });
    try {
        spec.validate();
    } catch (const ContractError& e) {
        throw IoError(std::string("phantom: ") + e.what());
    }
    return spec;
}

inline json to_json(const ScanParams& s) { return {{"gamma_bar", s.gamma_bar}, {"b0", s.b0}, {"te", s.te}}; }

inline ScanParams scan_from_json(const json& j)
{
    return detail::guarded("scan", [&] {
        ScanParams s;
        s.gamma_bar = j.value("gamma_bar", s.gamma_bar);
        s.b0        = j.value("b0", s.b0);
        s.te        = j.value("te", s.te);
        return s;
    });
}

inline json to_json(const AdmmParams& a)
{
    return {{"lambda", a.lambda}, {"mu", a.mu},   {"rank_r", a.rank_r},
            {"max_iters", a.max_iters}, {"tol", a.tol}, {"eps_weight", a.eps_weight}};
}

inline AdmmParams admm_from_json(const json& j, AdmmParams a = {})
{
    return detail::guarded("admm", [&] {
        a.lambda     = j.value("lambda", a.lambda);
        a.mu         = j.value("mu", a.mu);
        a.rank_r     = j.value("rank_r", a.rank_r);
        a.max_iters  = j.value("max_iters", a.max_iters);
        a.tol        = j.value("tol", a.tol);
        a.eps_weight = j.value("eps_weight", a.eps_weight);
        return a;
    });
}

/// Accepts either [lo, hi] pairs or explicit keys.
inline SweepConfig sweep_from_json(const json& j)
{
    return detail::guarded("sweep", [&] {
        SweepConfig c;
        if (j.contains("mu_range")) {
            auto r = j.at("mu_range").get<std::vector<double>>();
            if (r.size() != 2)
                throw IoError("sweep: mu_range must be [lo, hi]");
            c.mu_lo = r[0];
            c.mu_hi = r[1];
        }
        if (j.contains("lambda_range")) {
            auto r = j.at("lambda_range").get<std::vector<double>>();
            if (r.size() != 2)
                throw IoError("sweep: lambda_range must be [lo, hi]");
            c.lambda_lo = r[0];
            c.lambda_hi = r[1];
        }
        c.step = j.value("step", c.step);
        if (j.contains("noise_sigma"))
            c.noise_sigma = j.at("noise_sigma").get<double>();
        return c;
    });
}

inline json to_json(const SweepConfig& c)
{
    json j{{"mu_range", {c.mu_lo, c.mu_hi}}, {"lambda_range", {c.lambda_lo, c.lambda_hi}}, {"step", c.step}};
    if (c.noise_sigma)
        j["noise_sigma"] = *c.noise_sigma;
    return j;
}

struct RegularizationPreset
{
    double lambda;
    double mu;
};

/// Reference (lambda, mu) points for phantom and in vivo data.
inline const std::map<std::string, RegularizationPreset>& regularization_presets()
{
    static const std::map<std::string, RegularizationPreset> presets{
        {"phantom", {std::pow(10.0, 1.4), std::pow(10.0, -1.8)}},
        {"invivo", {std::pow(10.0, 1.4), std::pow(10.0, -2.2)}},
        {"invivo-experiment", {std::pow(10.0, 2.4), std::pow(10.0, -2.2)}},
    };
    return presets;
}

inline RegularizationPreset preset(const std::string& name)
{
    const auto& p = regularization_presets();
    auto it       = p.find(name);
    if (it == p.end())
        throw IoError("unknown preset '" + name + "'");
    return it->second;
}

inline json read_json(const std::filesystem::path& path)
{
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open config '" + path.string() + "'");
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw IoError("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
}

} // namespace alohaqsm::io

#endif
