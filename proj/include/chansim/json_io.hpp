#pragma once

#include <string>

#include <json.hpp>

#include "chansim/auxsearch.hpp"
#include "chansim/instances.hpp"
#include "chansim/osrb.hpp"
#include "chansim/regions.hpp"

namespace chansim {

using Json = nlohmann::json;

// Instance and decomposition files carry a "type" tag; loaders reject a
// mismatched tag with a position-annotated error.
Json load_json_file(const std::string& path);

P2PInstance p2p_instance_from_json(const Json& j);
Json p2p_instance_to_json(const P2PInstance& inst);
AuxP2P aux_p2p_from_json(const Json& j);
Json aux_p2p_to_json(const AuxP2P& aux);

MACInstance mac_instance_from_json(const Json& j);
Json mac_instance_to_json(const MACInstance& inst);
AuxMAC aux_mac_from_json(const Json& j);
Json aux_mac_to_json(const AuxMAC& aux);

BCInstance bc_instance_from_json(const Json& j);
Json bc_instance_to_json(const BCInstance& inst);
AuxBC aux_bc_from_json(const Json& j);
Json aux_bc_to_json(const AuxBC& aux);

AuxCuff aux_cuff_from_json(const Json& j);
Json aux_cuff_to_json(const AuxCuff& aux);

Json kernel_to_json(const Kernel& k);
Kernel kernel_from_json(const Json& j);

Json region_report_to_json(const RegionReport& rep);
Json search_result_to_json(const SearchResult& res);
Json sim_report_to_json(const SimReport& rep);

// Minimal structural validator driven by the schema files shipped in
// share/schemas: checks "type" (object/array/number/string/integer/bool),
// "required", "properties", "items" and "enum". Returns an empty string on
// success, else the first violation.
std::string validate_against_schema(const Json& doc, const Json& schema);

}  // namespace chansim
