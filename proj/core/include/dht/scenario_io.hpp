#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dht/bounds.hpp"
#include "dht/extreal.hpp"

namespace dht {

struct NamedAux {
    std::string name;
    AuxiliaryReceiver aux;
};

struct NamedJAugmentation {
    std::string name;
    std::string base_aux; // name of the aux receiver supplying Z
    Kernel p_j_given_xyz;
    Kernel q_j_given_xyz;
};

struct NamedChain {
    std::string name;
    std::vector<ChainLink> links;
};

struct ValidationReport {
    ExtReal d_pxy_qxy;                                      // KL finiteness of the pair
    std::vector<std::pair<std::string, ExtReal>> d_pxz_qxz; // per aux receiver
    std::vector<std::string> notes;
};

/// In-memory form of a scenario document (schema_version 1): the testing
/// instance plus optional named auxiliary receivers, J augmentations and
/// receiver chains.
struct ScenarioFile {
    int schema_version = 1;
    DiscreteScenario scenario;
    std::vector<NamedAux> aux_receivers;
    std::vector<NamedJAugmentation> j_augmentations;
    std::vector<NamedChain> chains;
    ValidationReport validation;
};

/// Parse and fully validate a scenario document. Parse failures carry the
/// position; invariant violations name the offending table and row.
ScenarioFile parse_scenario(const std::string& text, const std::string& origin = "<memory>");
ScenarioFile load_scenario(const std::string& path);

/// Canonical serialization; save -> load round-trips every table
/// bit-identically.
std::string save_scenario(const ScenarioFile& sf);
void save_scenario_file(const ScenarioFile& sf, const std::string& path);

} // namespace dht
