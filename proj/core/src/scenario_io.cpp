#include "dht/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dht/errors.hpp"
#include "dht/info.hpp"

namespace dht {

namespace {

using nlohmann::json;

int line_of_byte(const std::string& text, size_t byte) {
    int line = 1;
    for (size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

std::vector<double> flat_table(const json& rows, int nrows, int ncols, const std::string& table) {
    if (!rows.is_array() || static_cast<int>(rows.size()) != nrows)
        throw InputError("table '" + table + "': expected " + std::to_string(nrows) + " rows");
    std::vector<double> out;
    out.reserve(static_cast<size_t>(nrows) * ncols);
    for (int r = 0; r < nrows; ++r) {
        const json& row = rows[static_cast<size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != ncols)
            throw InputError("table '" + table + "' row " + std::to_string(r) + ": expected " +
                             std::to_string(ncols) + " entries");
        for (const auto& v : row) {
            if (!v.is_number())
                throw InputError("table '" + table + "' row " + std::to_string(r) +
                                 ": non-numeric entry");
            out.push_back(v.get<double>());
        }
    }
    return out;
}

json nested(const std::vector<double>& flat, int nrows, int ncols) {
    json rows = json::array();
    for (int r = 0; r < nrows; ++r) {
        json row = json::array();
        for (int c = 0; c < ncols; ++c) row.push_back(flat[static_cast<size_t>(r) * ncols + c]);
        rows.push_back(std::move(row));
    }
    return rows;
}

Kernel parse_kernel(const json& rows, int nrows, int ncols, const std::string& table) {
    try {
        return Kernel(nrows, ncols, flat_table(rows, nrows, ncols, table));
    } catch (const InputError& e) {
        throw InputError("table '" + table + "': " + e.what());
    }
}

// expand an X-indexed kernel to (X,Y)-indexed rows constant in y
Kernel expand_rows(const Kernel& per_x, int ny) {
    std::vector<double> m;
    m.reserve(static_cast<size_t>(per_x.rows()) * ny * per_x.cols());
    for (int x = 0; x < per_x.rows(); ++x)
        for (int y = 0; y < ny; ++y)
            for (int c = 0; c < per_x.cols(); ++c) m.push_back(per_x(x, c));
    return Kernel(per_x.rows() * ny, per_x.cols(), std::move(m));
}

} // namespace

ScenarioFile parse_scenario(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(origin + ": parse error at line " +
                         std::to_string(line_of_byte(text, e.byte)) + ": " + e.what());
    }
    try {
        if (!doc.is_object()) throw InputError("document must be a JSON object");
        if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer())
            throw InputError("missing integer field 'schema_version'");
        int ver = doc["schema_version"].get<int>();
        if (ver != 1) throw InputError("unsupported schema_version " + std::to_string(ver));
        if (!doc.contains("alphabets") || !doc["alphabets"].is_object())
            throw InputError("missing object field 'alphabets'");
        const json& al = doc["alphabets"];
        auto alpha = [&](const std::string& n) {
            if (!al.contains(n) || !al[n].is_number_integer())
                throw InputError("alphabets: missing integer size for '" + n + "'");
            return al[n].get<int>();
        };
        int nx = alpha("X"), ny = alpha("Y");
        if (!doc.contains("rate") || !doc["rate"].is_number())
            throw InputError("missing numeric field 'rate'");
        double rate = doc["rate"].get<double>();
        if (!doc.contains("p_xy") || !doc.contains("q_xy"))
            throw InputError("missing tables 'p_xy'/'q_xy'");

        auto build_joint = [&](const char* field) {
            try {
                return JointTable({{"X", nx}, {"Y", ny}},
                                  flat_table(doc[field], nx, ny, field));
            } catch (const InputError& e) {
                std::string msg = e.what();
                if (msg.rfind("table", 0) == 0) throw;
                throw InputError("table '" + std::string(field) + "': " + msg);
            }
        };
        DiscreteScenario scn(build_joint("p_xy"), build_joint("q_xy"), rate);

        ScenarioFile sf{ver, scn, {}, {}, {}, {ExtReal(0.0), {}, {}}};

        if (doc.contains("aux_receivers")) {
            if (!doc["aux_receivers"].is_array())
                throw InputError("'aux_receivers' must be an array");
            for (const auto& a : doc["aux_receivers"]) {
                if (!a.contains("name") || !a["name"].is_string())
                    throw InputError("aux receiver without a string 'name'");
                std::string name = a["name"].get<std::string>();
                int nz = al.contains("Z") ? alpha("Z") : -1;
                auto kernel_of = [&](const char* xy_field, const char* x_field) {
                    if (a.contains(xy_field)) {
                        const json& rows = a[xy_field];
                        int cols = nz > 0 ? nz
                                          : (rows.is_array() && !rows.empty() && rows[0].is_array()
                                                 ? static_cast<int>(rows[0].size())
                                                 : -1);
                        return parse_kernel(rows, nx * ny, cols, name + "." + xy_field);
                    }
                    if (a.contains(x_field)) {
                        const json& rows = a[x_field];
                        int cols = nz > 0 ? nz
                                          : (rows.is_array() && !rows.empty() && rows[0].is_array()
                                                 ? static_cast<int>(rows[0].size())
                                                 : -1);
                        return expand_rows(parse_kernel(rows, nx, cols, name + "." + x_field), ny);
                    }
                    throw InputError("aux receiver '" + name + "': missing '" +
                                     std::string(xy_field) + "' or '" + x_field + "'");
                };
                Kernel p = kernel_of("p_z_given_xy", "p_z_given_x");
                Kernel q = kernel_of("q_z_given_xy", "q_z_given_x");
                if (nz > 0 && (p.cols() != nz || q.cols() != nz))
                    throw InputError("aux receiver '" + name +
                                     "': declared |Z| does not match table dimensions");
                sf.aux_receivers.push_back({name, AuxiliaryReceiver(p, q)});
            }
        }

        if (doc.contains("j_augmentations")) {
            if (!doc["j_augmentations"].is_array())
                throw InputError("'j_augmentations' must be an array");
            for (const auto& a : doc["j_augmentations"]) {
                if (!a.contains("name") || !a["name"].is_string())
                    throw InputError("j augmentation without a string 'name'");
                std::string name = a["name"].get<std::string>();
                if (!a.contains("base_aux") || !a["base_aux"].is_string())
                    throw InputError("j augmentation '" + name + "': missing 'base_aux'");
                std::string base = a["base_aux"].get<std::string>();
                int nz = -1;
                for (const auto& na : sf.aux_receivers)
                    if (na.name == base) nz = na.aux.z_size();
                if (nz < 0)
                    throw InputError("j augmentation '" + name + "': unknown base_aux '" + base +
                                     "'");
                int nj = al.contains("J") ? alpha("J") : -1;
                auto jk = [&](const char* field) {
                    const json& rows = a[field];
                    int cols = nj > 0 ? nj
                                      : (rows.is_array() && !rows.empty() && rows[0].is_array()
                                             ? static_cast<int>(rows[0].size())
                                             : -1);
                    return parse_kernel(rows, nx * ny * nz, cols, name + "." + field);
                };
                if (!a.contains("p_j_given_xyz") || !a.contains("q_j_given_xyz"))
                    throw InputError("j augmentation '" + name + "': missing J kernels");
                sf.j_augmentations.push_back({name, base, jk("p_j_given_xyz"),
                                              jk("q_j_given_xyz")});
            }
        }

        if (doc.contains("chains")) {
            if (!doc["chains"].is_array()) throw InputError("'chains' must be an array");
            for (const auto& c : doc["chains"]) {
                if (!c.contains("name") || !c["name"].is_string())
                    throw InputError("chain without a string 'name'");
                std::string name = c["name"].get<std::string>();
                if (!c.contains("links") || !c["links"].is_array() || c["links"].empty())
                    throw InputError("chain '" + name + "': needs a non-empty 'links' array");
                NamedChain nc{name, {}};
                int li = 0;
                for (const auto& l : c["links"]) {
                    auto lk = [&](const char* field) {
                        if (!l.contains(field))
                            throw InputError("chain '" + name + "' link " + std::to_string(li) +
                                             ": missing '" + field + "'");
                        const json& rows = l[field];
                        int cols = rows.is_array() && !rows.empty() && rows[0].is_array()
                                       ? static_cast<int>(rows[0].size())
                                       : -1;
                        return parse_kernel(rows, nx, cols,
                                            name + "[" + std::to_string(li) + "]." + field);
                    };
                    Kernel p = lk("p_z_given_x");
                    Kernel q = lk("q_z_given_x");
                    if (p.cols() != q.cols())
                        throw InputError("chain '" + name + "' link " + std::to_string(li) +
                                         ": z alphabets differ between hypotheses");
                    nc.links.push_back({p, q});
                    ++li;
                }
                sf.chains.push_back(std::move(nc));
            }
        }

        // validation report: KL finiteness of the pair and of each (X,Z) pair
        sf.validation.d_pxy_qxy =
            kl_divergence(sf.scenario.p_xy.flatten(), sf.scenario.q_xy.flatten());
        for (const auto& na : sf.aux_receivers) {
            JointTable p_xz =
                sf.scenario.p_xy.extend(na.aux.p_z_given_xy, {"X", "Y"}, "Z").marginal({"X", "Z"});
            JointTable q_xz =
                sf.scenario.q_xy.extend(na.aux.q_z_given_xy, {"X", "Y"}, "Z").marginal({"X", "Z"});
            sf.validation.d_pxz_qxz.emplace_back(
                na.name, kl_divergence(p_xz.flatten(), q_xz.flatten()));
        }
        if (!sf.validation.d_pxy_qxy.finite())
            sf.validation.notes.push_back(
                "D(P_XY||Q_XY) is infinite: upper-bound operations are unavailable");
        return sf;
    } catch (const InputError& e) {
        throw InputError(origin + ": " + e.what());
    }
}

ScenarioFile load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open scenario file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path);
}

std::string save_scenario(const ScenarioFile& sf) {
    json doc;
    doc["schema_version"] = sf.schema_version;
    const int nx = sf.scenario.x_size(), ny = sf.scenario.y_size();
    doc["alphabets"] = {{"X", nx}, {"Y", ny}};
    if (!sf.aux_receivers.empty())
        doc["alphabets"]["Z"] = sf.aux_receivers.front().aux.z_size();
    if (!sf.j_augmentations.empty())
        doc["alphabets"]["J"] = sf.j_augmentations.front().p_j_given_xyz.cols();
    doc["rate"] = sf.scenario.rate;
    doc["p_xy"] = nested(sf.scenario.p_xy.flat(), nx, ny);
    doc["q_xy"] = nested(sf.scenario.q_xy.flat(), nx, ny);
    if (!sf.aux_receivers.empty()) {
        json arr = json::array();
        for (const auto& na : sf.aux_receivers) {
            json a;
            a["name"] = na.name;
            a["p_z_given_xy"] =
                nested(na.aux.p_z_given_xy.flat(), nx * ny, na.aux.z_size());
            a["q_z_given_xy"] =
                nested(na.aux.q_z_given_xy.flat(), nx * ny, na.aux.z_size());
            arr.push_back(std::move(a));
        }
        doc["aux_receivers"] = std::move(arr);
    }
    if (!sf.j_augmentations.empty()) {
        json arr = json::array();
        for (const auto& ja : sf.j_augmentations) {
            json a;
            a["name"] = ja.name;
            a["base_aux"] = ja.base_aux;
            a["p_j_given_xyz"] =
                nested(ja.p_j_given_xyz.flat(), ja.p_j_given_xyz.rows(), ja.p_j_given_xyz.cols());
            a["q_j_given_xyz"] =
                nested(ja.q_j_given_xyz.flat(), ja.q_j_given_xyz.rows(), ja.q_j_given_xyz.cols());
            arr.push_back(std::move(a));
        }
        doc["j_augmentations"] = std::move(arr);
    }
    if (!sf.chains.empty()) {
        json arr = json::array();
        for (const auto& ch : sf.chains) {
            json c;
            c["name"] = ch.name;
            json links = json::array();
            for (const auto& l : ch.links) {
                json lj;
                lj["p_z_given_x"] = nested(l.p_z_given_x.flat(), nx, l.p_z_given_x.cols());
                lj["q_z_given_x"] = nested(l.q_z_given_x.flat(), nx, l.q_z_given_x.cols());
                links.push_back(std::move(lj));
            }
            c["links"] = std::move(links);
            arr.push_back(std::move(c));
        }
        doc["chains"] = std::move(arr);
    }
    return doc.dump(2) + "\n";
}

void save_scenario_file(const ScenarioFile& sf, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write scenario file '" + path + "'");
    out << save_scenario(sf);
}

} // namespace dht
