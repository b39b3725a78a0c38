#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "vgate/errors.hpp"

namespace vgate {

/// Emitted JSON preserves insertion order so golden files and reports have a
/// stable, human-auditable field layout.
using ojson = nlohmann::ordered_json;

/// Which electrode an island ends up attached to under a given set of
/// junction states. floating = reaches neither bus nor ground.
enum class IslandSide { bus, ground, floating };

const char* to_string(IslandSide s);

enum class JunctionKind {
    switchable,  ///< on/off only (junctions 1-6 of the resonator device)
    tunable,     ///< carries a continuous coupling during gate operation (7, 8)
    fixed_strong ///< always on (the strong SQUID junction)
};

struct MzmInfo {
    std::string name;   ///< e.g. "a1" ... "b3"
    std::string island; ///< hosting island
    std::string qubit;  ///< group label, e.g. "lower"/"upper" or "q1".."q3"
    int index = 0;      ///< 1-based position within its qubit triple
    std::string kind;   ///< "endpoint" or "trijunction" (documentation only)
};

struct JunctionInfo {
    std::string name;
    JunctionKind kind = JunctionKind::switchable;
    std::string end_a; ///< island name, or the bus/ground node name
    std::string end_b;
    std::string role; ///< optional: "J1"/"J2"/"J3" for the gate SQUID
};

/// Declarative device description loaded from a JSON fixture. The topology
/// (which junction touches which island, where each MZM sits) is data, not
/// code: compilation logic below is generic graph connectivity.
///
/// Fixture JSON schema:
///   name     string - device name
///   bus      string - name of the bus node
///   ground   string - name of the phase-ground node
///   islands  array of {name, mzms: [mzm names], notes?}
///   mzms     array of {name, island, qubit, index, kind} in canonical parity
///            order (the order used to print operator labels)
///   junctions array of {name, kind: "switchable"|"tunable"|"fixed_strong",
///            ends: [node, node], role?}
///   gate_step optional {open: [junction names], closed: [junction names]} -
///            the switch settings while the phase gate runs (the SQUID
///            tunables take continuous couplings instead)
struct DeviceGraph {
    std::string name;
    std::string bus;
    std::string ground;
    std::vector<std::string> islands;
    std::vector<MzmInfo> mzms;
    std::vector<JunctionInfo> junctions;
    std::vector<std::string> gate_open;   ///< switches opened for the gate
    std::vector<std::string> gate_closed; ///< switches closed for the gate

    static DeviceGraph from_json(const ojson& j);
    ojson to_json() const;

    /// Structural checks: unique names, junction endpoints resolve, every
    /// island reaches bus or ground through some junction path, fixed-strong
    /// junctions exist where roles demand. Throws ConfigError.
    void validate() const;

    int island_index(const std::string& island) const; ///< -1 if absent
    const JunctionInfo* junction(const std::string& name) const;
    const MzmInfo* mzm(const std::string& name) const;
    const MzmInfo* mzm_by_role(const std::string& qubit, int index) const;
    int mzm_index(const std::string& name) const; ///< canonical order, -1 if absent
};

/// Junction name -> on(true)/off(false). Every junction of the device must
/// be present; fixed-strong junctions must be on.
using JunctionStates = std::map<std::string, bool>;

struct IslandPartition {
    std::vector<IslandSide> side; ///< indexed like DeviceGraph::islands
    int n_floating() const;
    bool operator==(const IslandPartition&) const = default;
};

/// Connected-component labeling of the device under the on junctions.
/// Throws ShortCircuit if bus and ground end up in one component, and
/// ConfigError on missing/extra junction states or an off fixed-strong
/// junction. Result depends only on the set of on edges, not on declaration
/// order.
IslandPartition partition(const DeviceGraph& device,
                          const JunctionStates& states);

/// A joint parity readout: the MZM set whose parity the configuration
/// resolves, in canonical order.
struct CompiledOperator {
    std::vector<std::string> mzms;
    std::string label;
    bool inferred = false; ///< true: ground-side value, needs a tare record

    bool operator==(const CompiledOperator&) const = default;
};

/// Result of a tare (all-islands-to-bus total-parity measurement); required
/// before any ground-side inference.
struct TareRecord {
    int total_parity = +1; ///< recorded +-1 outcome
};

/// The parity operator a configuration measures. side = bus reads the
/// bus-connected MZM set directly; side = ground returns the complement set
/// (everything not on the bus - grounded or floating islands alike), whose
/// value is (recorded total parity) x (bus outcome), hence requires `tare`.
/// Throws OddSet if the requested set has odd cardinality, TareMissing if
/// side = ground without a tare record.
CompiledOperator measured_operator(const DeviceGraph& device,
                                   const JunctionStates& states,
                                   const TareRecord* tare = nullptr,
                                   IslandSide side = IslandSide::bus);

struct MeasurementConfig {
    JunctionStates states;
    IslandPartition islands;
    CompiledOperator op;

    ojson to_json(const DeviceGraph& device) const;
};

/// Exhaustive search over on/off assignments of the non-fixed junctions for
/// a configuration measuring exactly the target MZM set, either directly on
/// the bus side or by ground-side inference. Canonical pick among matches:
/// direct beats inferred, then fewest floating islands, then lexicographically
/// smallest on-set (junction declaration order). Throws Unreachable if no
/// assignment works.
MeasurementConfig compile_measurement(const DeviceGraph& device,
                                      const std::vector<std::string>& target,
                                      const std::string& label);

/// RAMM compilation: one Pauli word over the device's qubits (fixture order),
/// e.g. "XIZ". Per qubit the bus-side pair is X -> {m2, m3}, Y -> {m1, m3},
/// Z -> {m1, m2}; identity factors leave the qubit's islands on ground. The
/// device must be RAMM-shaped: one MZM per island, a bus tap and a ground tap
/// per island. Rejects the all-identity word.
MeasurementConfig compile_pauli_product(const DeviceGraph& ramm,
                                        const std::string& word);

/// Full CHSH experiment script: tare, two forced-measurement entangling
/// initializations, the phase-gate step (junctions 2 and 3 off, the SQUID
/// couplings set from the instanton inversion for theta_target, flux ramp
/// 0 -> 2pi, release), then the four correlator rounds, each annotated with
/// its measurement configs and the engine-simulated expected correlator.
/// Returns a JSON array of step objects plus a trailing summary entry.
ojson chsh_script(const DeviceGraph& device, double theta_target);

/// Compile one of the named protocol targets on the six-MZM gate device:
/// tare, init1, init2, upperX, upperZ, lowerx, lowerz. Throws ConfigError for
/// an unknown key or a device missing the required (qubit, index) roles.
MeasurementConfig compile_named_target(const DeviceGraph& device,
                                       const std::string& key);

/// Report envelope shared by the CLI and the golden tests so both emit
/// byte-identical JSON: tool version, device and target names, then the
/// config fields of MeasurementConfig::to_json.
ojson measurement_report(const DeviceGraph& device, const std::string& target,
                         const MeasurementConfig& cfg);

} // namespace vgate
