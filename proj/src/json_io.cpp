#include "chansim/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace chansim {

namespace {

void require_type(const Json& j, const char* tag) {
  if (!j.is_object() || !j.contains("type") || j["type"] != tag)
    throw std::invalid_argument(std::string("expected a '") + tag +
                                "' document");
}

std::vector<double> number_array(const Json& j, const char* what) {
  if (!j.is_array())
    throw std::invalid_argument(std::string(what) + ": expected an array");
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number())
      throw std::invalid_argument(std::string(what) + ": expected numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

Kernel kernel_from(const Json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument(std::string(what) +
                                ": expected a non-empty array of rows");
  std::vector<std::vector<double>> rows;
  rows.reserve(j.size());
  for (const auto& r : j) rows.push_back(number_array(r, what));
  return Kernel::from_rows(rows);
}

std::size_t size_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_unsigned())
    throw std::invalid_argument(std::string("missing positive integer '") +
                                key + "'");
  return j[key].get<std::size_t>();
}

double number_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw std::invalid_argument(std::string("missing number '") + key + "'");
  return j[key].get<double>();
}

}  // namespace

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

Json kernel_to_json(const Kernel& k) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < k.input_size(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < k.output_size(); ++c) row.push_back(k(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Kernel kernel_from_json(const Json& j) { return kernel_from(j, "kernel"); }

P2PInstance p2p_instance_from_json(const Json& j) {
  require_type(j, "p2p");
  P2PInstance inst{Pmf(number_array(j.at("input"), "input")),
                   kernel_from(j.at("target"), "target"),
                   kernel_from(j.at("resource"), "resource"),
                   number_field(j, "rate")};
  if (inst.target.input_size() != inst.input.size())
    throw std::invalid_argument("p2p: target rows must match |X|");
  if (inst.rate < 0) throw std::invalid_argument("p2p: negative rate");
  return inst;
}

Json p2p_instance_to_json(const P2PInstance& inst) {
  return Json{{"type", "p2p"},
              {"input", inst.input.probs()},
              {"target", kernel_to_json(inst.target)},
              {"resource", kernel_to_json(inst.resource)},
              {"rate", inst.rate}};
}

AuxP2P aux_p2p_from_json(const Json& j) {
  require_type(j, "aux-p2p");
  return AuxP2P{size_field(j, "card_u"), kernel_from(j.at("enc"), "enc"),
                kernel_from(j.at("dec"), "dec")};
}

Json aux_p2p_to_json(const AuxP2P& aux) {
  return Json{{"type", "aux-p2p"},
              {"card_u", aux.card_u},
              {"enc", kernel_to_json(aux.enc)},
              {"dec", kernel_to_json(aux.dec)}};
}

MACInstance mac_instance_from_json(const Json& j) {
  require_type(j, "mac");
  const Json& rows = j.at("input_xy");
  if (!rows.is_array() || rows.empty())
    throw std::invalid_argument("mac: input_xy must be a matrix");
  std::size_t cx = rows.size();
  std::vector<double> table;
  std::size_t cy = 0;
  for (const auto& r : rows) {
    auto v = number_array(r, "input_xy");
    if (cy == 0) cy = v.size();
    if (v.size() != cy) throw std::invalid_argument("mac: ragged input_xy");
    table.insert(table.end(), v.begin(), v.end());
  }
  MACInstance inst{JointPmf({"X", "Y"}, {cx, cy}, table),
                   kernel_from(j.at("target"), "target"),
                   size_field(j, "card_xt"),
                   size_field(j, "card_yt"),
                   kernel_from(j.at("resource"), "resource"),
                   number_field(j, "rate1"),
                   number_field(j, "rate2")};
  if (inst.rate1 < 0 || inst.rate2 < 0)
    throw std::invalid_argument("mac: negative rate");
  return inst;
}

Json mac_instance_to_json(const MACInstance& inst) {
  Json rows = Json::array();
  std::size_t cx = inst.input_xy.dim("X"), cy = inst.input_xy.dim("Y");
  for (std::size_t x = 0; x < cx; ++x) {
    Json row = Json::array();
    for (std::size_t y = 0; y < cy; ++y)
      row.push_back(inst.input_xy.table()[x * cy + y]);
    rows.push_back(std::move(row));
  }
  return Json{{"type", "mac"},
              {"input_xy", rows},
              {"target", kernel_to_json(inst.target)},
              {"card_xt", inst.card_xt},
              {"card_yt", inst.card_yt},
              {"resource", kernel_to_json(inst.resource)},
              {"rate1", inst.rate1},
              {"rate2", inst.rate2}};
}

AuxMAC aux_mac_from_json(const Json& j) {
  require_type(j, "aux-mac");
  return AuxMAC{size_field(j, "card_u"), size_field(j, "card_v"),
                kernel_from(j.at("enc1"), "enc1"),
                kernel_from(j.at("enc2"), "enc2"),
                kernel_from(j.at("dec"), "dec")};
}

Json aux_mac_to_json(const AuxMAC& aux) {
  return Json{{"type", "aux-mac"},     {"card_u", aux.card_u},
              {"card_v", aux.card_v},  {"enc1", kernel_to_json(aux.enc1)},
              {"enc2", kernel_to_json(aux.enc2)}, {"dec", kernel_to_json(aux.dec)}};
}

BCInstance bc_instance_from_json(const Json& j) {
  require_type(j, "bc");
  BCInstance inst{Pmf(number_array(j.at("input"), "input")),
                  size_field(j, "card_y"),
                  size_field(j, "card_z"),
                  kernel_from(j.at("target"), "target"),
                  size_field(j, "card_yt"),
                  size_field(j, "card_zt"),
                  kernel_from(j.at("resource"), "resource"),
                  number_field(j, "rate")};
  if (inst.rate < 0) throw std::invalid_argument("bc: negative rate");
  return inst;
}

Json bc_instance_to_json(const BCInstance& inst) {
  return Json{{"type", "bc"},
              {"input", inst.input.probs()},
              {"card_y", inst.card_y},
              {"card_z", inst.card_z},
              {"target", kernel_to_json(inst.target)},
              {"card_yt", inst.card_yt},
              {"card_zt", inst.card_zt},
              {"resource", kernel_to_json(inst.resource)},
              {"rate", inst.rate}};
}

AuxBC aux_bc_from_json(const Json& j) {
  require_type(j, "aux-bc");
  return AuxBC{size_field(j, "card_u"),          size_field(j, "card_v"),
               size_field(j, "card_w"),          kernel_from(j.at("enc"), "enc"),
               kernel_from(j.at("dec1"), "dec1"), kernel_from(j.at("dec2"), "dec2")};
}

Json aux_bc_to_json(const AuxBC& aux) {
  return Json{{"type", "aux-bc"},
              {"card_u", aux.card_u},
              {"card_v", aux.card_v},
              {"card_w", aux.card_w},
              {"enc", kernel_to_json(aux.enc)},
              {"dec1", kernel_to_json(aux.dec1)},
              {"dec2", kernel_to_json(aux.dec2)}};
}

AuxCuff aux_cuff_from_json(const Json& j) {
  require_type(j, "aux-cuff");
  AuxCuff aux{size_field(j, "card_u"), kernel_from(j.at("aux_u"), "aux_u"),
              kernel_from(j.at("dec"), "dec"), number_field(j, "wire_rate")};
  if (aux.wire_rate < 0) throw std::invalid_argument("aux-cuff: negative wire rate");
  return aux;
}

Json aux_cuff_to_json(const AuxCuff& aux) {
  return Json{{"type", "aux-cuff"},
              {"card_u", aux.card_u},
              {"aux_u", kernel_to_json(aux.aux_u)},
              {"dec", kernel_to_json(aux.dec)},
              {"wire_rate", aux.wire_rate}};
}

Json region_report_to_json(const RegionReport& rep) {
  Json slacks = Json::object();
  for (const auto& [name, v] : rep.slacks) slacks[name] = v;
  Json out{{"verdict", to_string(rep.verdict)},
           {"slacks", slacks},
           {"min_slack", rep.min_slack()},
           {"marginal_tv", rep.marginal_tv}};
  if (!rep.extras.empty()) out["extras"] = rep.extras;
  if (!rep.vectors.empty()) out["vectors"] = rep.vectors;
  if (!rep.notes.empty()) out["notes"] = rep.notes;
  return out;
}

Json search_result_to_json(const SearchResult& res) {
  Json kernels = Json::array();
  for (const auto& k : res.best_point) kernels.push_back(kernel_to_json(k));
  Json out{{"best_value", res.best_value}, {"converged", res.converged},
           {"residual", res.residual},     {"best_restart", res.best_restart},
           {"trace", res.trace},           {"best_point", kernels}};
  if (!res.notes.empty()) out["notes"] = res.notes;
  return out;
}

Json sim_report_to_json(const SimReport& rep) {
  Json out{{"n", rep.n},
           {"protocol", rep.protocol},
           {"tv_joint", rep.tv_joint},
           {"sw_error_prob", rep.sw_error_prob},
           {"bin_uniformity_tv", rep.bin_uniformity_tv},
           {"num_g", rep.num_g},
           {"num_w", rep.num_w},
           {"rate_g", rep.rate_g},
           {"rate_w", rep.rate_w},
           {"empty_bins", rep.empty_bins},
           {"zero_mass_events", rep.zero_mass_events},
           {"seed", rep.seed}};
  if (!rep.tv_per_g.empty()) out["tv_per_g"] = rep.tv_per_g;
  if (rep.fixed_g >= 0) out["fixed_g"] = rep.fixed_g;
  if (rep.monte_carlo) {
    out["monte_carlo"] = true;
    out["samples"] = rep.samples;
  }
  if (!rep.notes.empty()) out["notes"] = rep.notes;
  return out;
}

namespace {

std::string type_name(const Json& j) {
  if (j.is_object()) return "object";
  if (j.is_array()) return "array";
  if (j.is_string()) return "string";
  if (j.is_boolean()) return "boolean";
  if (j.is_number_integer() || j.is_number_unsigned()) return "integer";
  if (j.is_number()) return "number";
  return "null";
}

std::string validate_node(const Json& doc, const Json& schema,
                          const std::string& path) {
  if (schema.contains("type")) {
    std::string want = schema["type"].get<std::string>();
    std::string got = type_name(doc);
    bool ok = want == got || (want == "number" && got == "integer");
    if (!ok) return path + ": expected " + want + ", got " + got;
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& e : schema["enum"])
      if (e == doc) found = true;
    if (!found) return path + ": value not in enum";
  }
  if (doc.is_object()) {
    if (schema.contains("required"))
      for (const auto& key : schema["required"])
        if (!doc.contains(key.get<std::string>()))
          return path + ": missing required key '" + key.get<std::string>() +
                 "'";
    if (schema.contains("properties"))
      for (auto it = schema["properties"].begin();
           it != schema["properties"].end(); ++it)
        if (doc.contains(it.key())) {
          std::string err =
              validate_node(doc[it.key()], it.value(), path + "/" + it.key());
          if (!err.empty()) return err;
        }
  }
  if (doc.is_array() && schema.contains("items")) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      std::string err = validate_node(doc[i], schema["items"],
                                      path + "/" + std::to_string(i));
      if (!err.empty()) return err;
    }
  }
  return "";
}

}  // namespace

std::string validate_against_schema(const Json& doc, const Json& schema) {
  return validate_node(doc, schema, "$");
}

}  // namespace chansim
