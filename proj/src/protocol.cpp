#include "vgate/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "vgate/instanton.hpp"
#include "vgate/io.hpp"
#include "vgate/majorana.hpp"
#include "vgate/params.hpp"
#include "vgate/rng.hpp"

namespace vgate {

const char* to_string(IslandSide s) {
    switch (s) {
        case IslandSide::bus: return "bus";
        case IslandSide::ground: return "ground";
        case IslandSide::floating: return "floating";
    }
    throw Unreachable("to_string: bad IslandSide");
}

namespace {

JunctionKind kind_from_string(const std::string& s) {
    if (s == "switchable") return JunctionKind::switchable;
    if (s == "tunable") return JunctionKind::tunable;
    if (s == "fixed_strong") return JunctionKind::fixed_strong;
    throw ConfigError("unknown junction kind '" + s + "'");
}

const char* kind_to_string(JunctionKind k) {
    switch (k) {
        case JunctionKind::switchable: return "switchable";
        case JunctionKind::tunable: return "tunable";
        case JunctionKind::fixed_strong: return "fixed_strong";
    }
    throw Unreachable("kind_to_string: bad kind");
}

struct Dsu {
    std::vector<int> parent;
    explicit Dsu(int n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(
                    parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(a)] = b;
    }
};

std::string join_names(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ' ';
        out += names[i];
    }
    return out;
}

} // namespace

DeviceGraph DeviceGraph::from_json(const ojson& j) {
    DeviceGraph d;
    d.name = j.at("name").get<std::string>();
    d.bus = j.at("bus").get<std::string>();
    d.ground = j.at("ground").get<std::string>();
    for (const auto& ji : j.at("islands")) {
        d.islands.push_back(ji.at("name").get<std::string>());
    }
    for (const auto& jm : j.at("mzms")) {
        MzmInfo m;
        m.name = jm.at("name").get<std::string>();
        m.island = jm.at("island").get<std::string>();
        m.qubit = jm.at("qubit").get<std::string>();
        m.index = jm.at("index").get<int>();
        if (jm.contains("kind")) m.kind = jm.at("kind").get<std::string>();
        d.mzms.push_back(std::move(m));
    }
    for (const auto& jj : j.at("junctions")) {
        JunctionInfo info;
        info.name = jj.at("name").get<std::string>();
        info.kind = kind_from_string(jj.at("kind").get<std::string>());
        const auto& ends = jj.at("ends");
        if (!ends.is_array() || ends.size() != 2)
            throw ConfigError("junction '" + info.name +
                              "': ends must be a 2-element array");
        info.end_a = ends[0].get<std::string>();
        info.end_b = ends[1].get<std::string>();
        if (jj.contains("role")) info.role = jj.at("role").get<std::string>();
        d.junctions.push_back(std::move(info));
    }
    // The per-island mzm listing is redundant with the mzms array; require
    // the two views to agree so a hand-edited fixture cannot drift apart.
    for (const auto& ji : j.at("islands")) {
        const std::string island = ji.at("name").get<std::string>();
        std::vector<std::string> listed;
        if (ji.contains("mzms"))
            for (const auto& n : ji.at("mzms"))
                listed.push_back(n.get<std::string>());
        std::vector<std::string> placed;
        for (const auto& m : d.mzms)
            if (m.island == island) placed.push_back(m.name);
        std::sort(listed.begin(), listed.end());
        std::sort(placed.begin(), placed.end());
        if (listed != placed)
            throw ConfigError("island '" + island +
                              "': mzm listing disagrees with mzm placements");
    }
    if (j.contains("gate_step")) {
        const auto& g = j.at("gate_step");
        for (const auto& n : g.at("open"))
            d.gate_open.push_back(n.get<std::string>());
        for (const auto& n : g.at("closed"))
            d.gate_closed.push_back(n.get<std::string>());
    }
    d.validate();
    return d;
}

ojson DeviceGraph::to_json() const {
    ojson j;
    j["name"] = name;
    j["bus"] = bus;
    j["ground"] = ground;
    j["islands"] = ojson::array();
    for (const auto& island : islands) {
        ojson ji;
        ji["name"] = island;
        ji["mzms"] = ojson::array();
        for (const auto& m : mzms)
            if (m.island == island) ji["mzms"].push_back(m.name);
        j["islands"].push_back(std::move(ji));
    }
    j["mzms"] = ojson::array();
    for (const auto& m : mzms) {
        ojson jm;
        jm["name"] = m.name;
        jm["island"] = m.island;
        jm["qubit"] = m.qubit;
        jm["index"] = m.index;
        if (!m.kind.empty()) jm["kind"] = m.kind;
        j["mzms"].push_back(std::move(jm));
    }
    j["junctions"] = ojson::array();
    for (const auto& info : junctions) {
        ojson jj;
        jj["name"] = info.name;
        jj["kind"] = kind_to_string(info.kind);
        jj["ends"] = ojson::array({info.end_a, info.end_b});
        if (!info.role.empty()) jj["role"] = info.role;
        j["junctions"].push_back(std::move(jj));
    }
    if (!gate_open.empty() || !gate_closed.empty()) {
        j["gate_step"] = ojson{{"open", gate_open}, {"closed", gate_closed}};
    }
    return j;
}

void DeviceGraph::validate() const {
    if (name.empty()) throw ConfigError("device name empty");
    if (bus.empty() || ground.empty() || bus == ground)
        throw ConfigError("device needs distinct bus and ground nodes");
    auto is_node = [&](const std::string& n) {
        return n == bus || n == ground || island_index(n) >= 0;
    };
    for (std::size_t i = 0; i < islands.size(); ++i) {
        if (islands[i] == bus || islands[i] == ground)
            throw ConfigError("island '" + islands[i] +
                              "' collides with an electrode name");
        for (std::size_t k = i + 1; k < islands.size(); ++k)
            if (islands[i] == islands[k])
                throw ConfigError("duplicate island '" + islands[i] + "'");
    }
    for (std::size_t i = 0; i < mzms.size(); ++i) {
        const auto& m = mzms[i];
        if (island_index(m.island) < 0)
            throw ConfigError("mzm '" + m.name + "' placed on unknown island '" +
                              m.island + "'");
        if (m.qubit.empty() || m.index < 1)
            throw ConfigError("mzm '" + m.name + "' needs a qubit label and a "
                              "1-based index");
        for (std::size_t k = i + 1; k < mzms.size(); ++k)
            if (mzms[i].name == mzms[k].name)
                throw ConfigError("duplicate mzm '" + mzms[i].name + "'");
    }
    for (std::size_t i = 0; i < junctions.size(); ++i) {
        const auto& info = junctions[i];
        if (!is_node(info.end_a) || !is_node(info.end_b))
            throw ConfigError("junction '" + info.name +
                              "' references an unknown node");
        if (info.end_a == info.end_b)
            throw ConfigError("junction '" + info.name + "' is a self-loop");
        for (std::size_t k = i + 1; k < junctions.size(); ++k)
            if (junctions[i].name == junctions[k].name)
                throw ConfigError("duplicate junction '" + junctions[i].name +
                                  "'");
    }
    for (const auto& n : gate_open)
        if (!junction(n))
            throw ConfigError("gate_step.open references unknown junction '" +
                              n + "'");
    for (const auto& n : gate_closed)
        if (!junction(n))
            throw ConfigError("gate_step.closed references unknown junction '" +
                              n + "'");
    // Reachability with every junction conducting: each island must see an
    // electrode.
    const int n_nodes = static_cast<int>(islands.size()) + 2;
    Dsu dsu(n_nodes);
    auto node_id = [&](const std::string& n) {
        if (n == bus) return 0;
        if (n == ground) return 1;
        return 2 + island_index(n);
    };
    for (const auto& info : junctions)
        dsu.unite(node_id(info.end_a), node_id(info.end_b));
    for (std::size_t i = 0; i < islands.size(); ++i) {
        const int r = dsu.find(2 + static_cast<int>(i));
        if (r != dsu.find(0) && r != dsu.find(1))
            throw ConfigError("island '" + islands[i] +
                              "' cannot reach bus or ground through any "
                              "junction path");
    }
}

int DeviceGraph::island_index(const std::string& island) const {
    for (std::size_t i = 0; i < islands.size(); ++i)
        if (islands[i] == island) return static_cast<int>(i);
    return -1;
}

const JunctionInfo* DeviceGraph::junction(const std::string& n) const {
    for (const auto& info : junctions)
        if (info.name == n) return &info;
    return nullptr;
}

const MzmInfo* DeviceGraph::mzm(const std::string& n) const {
    for (const auto& m : mzms)
        if (m.name == n) return &m;
    return nullptr;
}

const MzmInfo* DeviceGraph::mzm_by_role(const std::string& qubit,
                                        int index) const {
    for (const auto& m : mzms)
        if (m.qubit == qubit && m.index == index) return &m;
    return nullptr;
}

int DeviceGraph::mzm_index(const std::string& n) const {
    for (std::size_t i = 0; i < mzms.size(); ++i)
        if (mzms[i].name == n) return static_cast<int>(i);
    return -1;
}

int IslandPartition::n_floating() const {
    int n = 0;
    for (IslandSide s : side)
        if (s == IslandSide::floating) ++n;
    return n;
}

namespace {

// Shared partition core: returns the labeling and whether bus and ground
// ended up connected, without throwing, so the compile search can skip
// shorted assignments cheaply.
IslandPartition partition_impl(const DeviceGraph& device,
                               const JunctionStates& states, bool& shorted) {
    const int n_nodes = static_cast<int>(device.islands.size()) + 2;
    Dsu dsu(n_nodes);
    for (const auto& info : device.junctions) {
        if (!states.at(info.name)) continue;
        auto node_id = [&](const std::string& n) {
            if (n == device.bus) return 0;
            if (n == device.ground) return 1;
            return 2 + device.island_index(n);
        };
        dsu.unite(node_id(info.end_a), node_id(info.end_b));
    }
    const int bus_root = dsu.find(0);
    const int ground_root = dsu.find(1);
    shorted = (bus_root == ground_root);
    IslandPartition part;
    part.side.resize(device.islands.size(), IslandSide::floating);
    for (std::size_t i = 0; i < device.islands.size(); ++i) {
        const int r = dsu.find(2 + static_cast<int>(i));
        if (r == bus_root)
            part.side[i] = IslandSide::bus;
        else if (r == ground_root)
            part.side[i] = IslandSide::ground;
    }
    return part;
}

void check_states(const DeviceGraph& device, const JunctionStates& states) {
    if (states.size() != device.junctions.size())
        throw ConfigError("junction states must be defined for all " +
                          std::to_string(device.junctions.size()) +
                          " junctions");
    for (const auto& info : device.junctions) {
        auto it = states.find(info.name);
        if (it == states.end())
            throw ConfigError("missing state for junction '" + info.name + "'");
        if (info.kind == JunctionKind::fixed_strong && !it->second)
            throw ConfigError("junction '" + info.name +
                              "' is fixed-strong and cannot be off");
    }
}

// MZM names on the requested side(s), in canonical declaration order.
std::vector<std::string> side_mzms(const DeviceGraph& device,
                                   const IslandPartition& part, bool bus_side) {
    std::vector<std::string> out;
    for (const auto& m : device.mzms) {
        const auto idx = static_cast<std::size_t>(device.island_index(m.island));
        const bool on_bus = part.side[idx] == IslandSide::bus;
        if (on_bus == bus_side) out.push_back(m.name);
    }
    return out;
}

} // namespace

IslandPartition partition(const DeviceGraph& device,
                          const JunctionStates& states) {
    check_states(device, states);
    bool shorted = false;
    IslandPartition part = partition_impl(device, states, shorted);
    if (shorted)
        throw ShortCircuit("bus and ground are connected through on-junctions "
                           "on device '" + device.name + "'");
    return part;
}

CompiledOperator measured_operator(const DeviceGraph& device,
                                   const JunctionStates& states,
                                   const TareRecord* tare, IslandSide side) {
    IslandPartition part = partition(device, states);
    if (side == IslandSide::floating)
        throw ConfigError("measured_operator: side must be bus or ground");
    if (side == IslandSide::bus) {
        std::vector<std::string> set = side_mzms(device, part, true);
        if (set.size() % 2 != 0)
            throw OddSet("bus-side MZM set {" + join_names(set) +
                         "} has odd cardinality");
        return CompiledOperator{std::move(set), "bus parity", false};
    }
    // Ground-side request: the readout still happens on the bus; the value of
    // the complement set (grounded or floating alike) is total x bus, so a
    // tare record must exist.
    std::vector<std::string> set = side_mzms(device, part, false);
    if (set.size() % 2 != 0)
        throw OddSet("ground-side MZM set {" + join_names(set) +
                     "} has odd cardinality");
    if (tare == nullptr)
        throw TareMissing("ground-side parity inference requires a tare "
                          "record");
    return CompiledOperator{std::move(set), "ground-side parity", true};
}

ojson MeasurementConfig::to_json(const DeviceGraph& device) const {
    ojson j;
    j["junction_states"] = ojson::object();
    for (const auto& info : device.junctions)
        j["junction_states"][info.name] = states.at(info.name) ? "on" : "off";
    j["islands"] = ojson::object();
    for (std::size_t i = 0; i < device.islands.size(); ++i)
        j["islands"][device.islands[i]] =
            to_string(islands.side[i]);
    j["measured"] = ojson{{"mzms", op.mzms},
                          {"label", op.label},
                          {"inferred", op.inferred}};
    return j;
}

MeasurementConfig compile_measurement(const DeviceGraph& device,
                                      const std::vector<std::string>& target,
                                      const std::string& label) {
    if (target.empty())
        throw ConfigError("compile_measurement: empty target");
    for (const auto& n : target)
        if (device.mzm(n) == nullptr)
            throw ConfigError("compile_measurement: unknown mzm '" + n + "'");
    std::vector<std::string> want = target;
    std::sort(want.begin(), want.end(), [&](const auto& a, const auto& b) {
        return device.mzm_index(a) < device.mzm_index(b);
    });
    if (std::adjacent_find(want.begin(), want.end()) != want.end())
        throw ConfigError("compile_measurement: duplicate mzm in target");
    if (want.size() % 2 != 0)
        throw ConfigError("compile_measurement: parity targets must contain "
                          "an even number of mzms");

    std::vector<const JunctionInfo*> free_junctions;
    for (const auto& info : device.junctions)
        if (info.kind != JunctionKind::fixed_strong)
            free_junctions.push_back(&info);
    if (free_junctions.size() > 22)
        throw ConfigError("compile_measurement: device too large for "
                          "exhaustive search");

    struct Key {
        int inferred;
        int n_floating;
        std::vector<int> on_set;
        bool operator<(const Key& other) const {
            if (inferred != other.inferred) return inferred < other.inferred;
            if (n_floating != other.n_floating)
                return n_floating < other.n_floating;
            return on_set < other.on_set;
        }
    };
    std::optional<Key> best_key;
    JunctionStates best_states;

    JunctionStates states;
    for (const auto& info : device.junctions)
        states[info.name] = (info.kind == JunctionKind::fixed_strong);

    const std::uint32_t n_masks = 1u << free_junctions.size();
    for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
        std::vector<int> on_set;
        for (std::size_t b = 0; b < free_junctions.size(); ++b) {
            const bool on = (mask >> b) & 1u;
            states[free_junctions[b]->name] = on;
            if (on) on_set.push_back(static_cast<int>(b));
        }
        bool shorted = false;
        IslandPartition part = partition_impl(device, states, shorted);
        if (shorted) continue;
        std::vector<std::string> bus_set = side_mzms(device, part, true);
        int inferred;
        if (bus_set == want) {
            inferred = 0;
        } else {
            std::vector<std::string> complement = side_mzms(device, part, false);
            if (complement != want) continue;
            inferred = 1;
        }
        Key key{inferred, part.n_floating(), std::move(on_set)};
        if (!best_key || key < *best_key) {
            best_key = std::move(key);
            best_states = states;
        }
    }
    if (!best_key)
        throw Unreachable("no junction assignment measures '" + label + "' {" +
                          join_names(want) + "}");

    MeasurementConfig cfg;
    cfg.states = std::move(best_states);
    cfg.islands = partition(device, cfg.states);
    cfg.op = CompiledOperator{std::move(want), label, best_key->inferred == 1};
    return cfg;
}

MeasurementConfig compile_pauli_product(const DeviceGraph& ramm,
                                        const std::string& word) {
    // Qubit labels in order of first appearance in the mzm list.
    std::vector<std::string> qubits;
    for (const auto& m : ramm.mzms)
        if (std::find(qubits.begin(), qubits.end(), m.qubit) == qubits.end())
            qubits.push_back(m.qubit);
    if (word.size() != qubits.size())
        throw ConfigError("pauli word '" + word + "' has " +
                          std::to_string(word.size()) + " factors; device has " +
                          std::to_string(qubits.size()) + " qubits");
    if (word.find_first_not_of("IXYZ") != std::string::npos)
        throw ConfigError("pauli word '" + word +
                          "' contains letters outside I, X, Y, Z");
    if (word.find_first_not_of('I') == std::string::npos)
        throw ConfigError("pauli word '" + word +
                          "' is the identity on every qubit");

    // RAMM shape: every island hosts exactly one MZM and has one tap to each
    // electrode; no island-island junctions.
    std::map<std::string, std::string> bus_tap, ground_tap;
    for (const auto& info : ramm.junctions) {
        const bool a_bus = info.end_a == ramm.bus;
        const bool b_bus = info.end_b == ramm.bus;
        const bool a_gnd = info.end_a == ramm.ground;
        const bool b_gnd = info.end_b == ramm.ground;
        const std::string island = (a_bus || a_gnd) ? info.end_b : info.end_a;
        if (a_bus || b_bus)
            bus_tap[island] = info.name;
        else if (a_gnd || b_gnd)
            ground_tap[island] = info.name;
        else
            throw ConfigError("device '" + ramm.name + "' is not RAMM-shaped: "
                              "junction '" + info.name +
                              "' joins two islands");
    }
    for (const auto& island : ramm.islands) {
        if (!bus_tap.count(island) || !ground_tap.count(island))
            throw ConfigError("device '" + ramm.name + "' is not RAMM-shaped: "
                              "island '" + island + "' needs a bus tap and a "
                              "ground tap");
        int hosted = 0;
        for (const auto& m : ramm.mzms)
            if (m.island == island) ++hosted;
        if (hosted != 1)
            throw ConfigError("device '" + ramm.name + "' is not RAMM-shaped: "
                              "island '" + island + "' hosts " +
                              std::to_string(hosted) + " MZMs");
    }

    // Per-qubit dictionary: X -> {m2, m3}, Y -> {m1, m3}, Z -> {m1, m2}.
    std::vector<std::string> target;
    for (std::size_t q = 0; q < qubits.size(); ++q) {
        int i1 = 0, i2 = 0;
        switch (word[q]) {
            case 'I': continue;
            case 'X': i1 = 2; i2 = 3; break;
            case 'Y': i1 = 1; i2 = 3; break;
            case 'Z': i1 = 1; i2 = 2; break;
            default: throw Unreachable("pauli word validation missed a letter");
        }
        for (int idx : {i1, i2}) {
            const MzmInfo* m = ramm.mzm_by_role(qubits[q], idx);
            if (m == nullptr)
                throw Unreachable("qubit '" + qubits[q] + "' has no mzm with "
                                  "index " + std::to_string(idx));
            target.push_back(m->name);
        }
    }

    // Composition: the target's islands go to the bus, everything else to
    // ground. With per-island taps this is the unique floaterless config.
    JunctionStates states;
    for (const auto& info : ramm.junctions) states[info.name] = false;
    for (const auto& island : ramm.islands) {
        bool on_bus = false;
        for (const auto& m : ramm.mzms)
            if (m.island == island &&
                std::find(target.begin(), target.end(), m.name) != target.end())
                on_bus = true;
        states[on_bus ? bus_tap[island] : ground_tap[island]] = true;
    }

    MeasurementConfig cfg;
    cfg.states = std::move(states);
    cfg.islands = partition(ramm, cfg.states);
    CompiledOperator direct = measured_operator(ramm, cfg.states);
    std::sort(target.begin(), target.end(), [&](const auto& a, const auto& b) {
        return ramm.mzm_index(a) < ramm.mzm_index(b);
    });
    if (direct.mzms != target)
        throw Unreachable("composed configuration does not measure '" + word +
                          "'");
    cfg.op = CompiledOperator{std::move(target), word, false};
    return cfg;
}

namespace {

Axis axis_from_char(char c) {
    switch (c) {
        case 'x': case 'X': return Axis::x;
        case 'y': case 'Y': return Axis::y;
        case 'z': case 'Z': return Axis::z;
    }
    throw Unreachable("axis_from_char: bad axis");
}

// Device MZM names for a qubit-axis Pauli, using the same pair dictionary as
// the engine (X -> {2,3}, Y -> {1,3}, Z -> {1,2} within the qubit's triple).
std::vector<std::string> pauli_target(const DeviceGraph& device,
                                      const std::string& qubit, char axis) {
    int i1 = 0, i2 = 0;
    switch (axis) {
        case 'x': case 'X': i1 = 2; i2 = 3; break;
        case 'y': case 'Y': i1 = 1; i2 = 3; break;
        case 'z': case 'Z': i1 = 1; i2 = 2; break;
        default: throw Unreachable("pauli_target: bad axis");
    }
    std::vector<std::string> out;
    for (int idx : {i1, i2}) {
        const MzmInfo* m = device.mzm_by_role(qubit, idx);
        if (m == nullptr)
            throw ConfigError("device '" + device.name + "' has no mzm " +
                              std::to_string(idx) + " on qubit '" + qubit +
                              "'");
        out.push_back(m->name);
    }
    return out;
}

} // namespace

ojson chsh_script(const DeviceGraph& device, double theta_target) {
    // Hardware constants for the gate step: alpha = J3/J = 2, E_C = 0.4 J,
    // beta = pi/2 via gate charge Q1 + Q2 = 1/4.
    const double alpha = 2.0;
    const double e_c = 0.4;
    const double q_plus = 0.25;
    const double beta = 2.0 * pi * q_plus;

    const double eps =
        solve_epsilon_for_phase(2.0 * theta_target, alpha, e_c, beta);
    const CircuitParams gate_params =
        CircuitParams::from_asymmetry(eps, alpha, e_c, q_plus, 0.0);
    const InstantonPrediction pred = predict(gate_params);
    if (std::abs(wrap_pi(pred.gate_phase_2theta - 2.0 * theta_target)) > 1e-9)
        throw Unreachable("gate-phase solve and prediction disagree");

    // Names of the six modes by role.
    auto role_name = [&](const std::string& qubit, int index) {
        const MzmInfo* m = device.mzm_by_role(qubit, index);
        if (m == nullptr)
            throw ConfigError("device '" + device.name +
                              "' is missing mzm (" + qubit + ", " +
                              std::to_string(index) + ")");
        return m->name;
    };
    const std::string l1 = role_name("lower", 1), l2 = role_name("lower", 2),
                      l3 = role_name("lower", 3), u1 = role_name("upper", 1),
                      u2 = role_name("upper", 2), u3 = role_name("upper", 3);

    // Exact engine simulation of the whole protocol. The forced-measurement
    // loop always lands on the same Bell state, so expectations below do not
    // depend on the retry seed.
    const MajoranaAlgebra alg = build_algebra();
    MajoranaRegister reg = make_register(alg, +1);
    std::mt19937_64 rng = seeded_engine(0x76a5e0c3d1b2f984ull);
    prepare_bell(alg, reg, rng);
    phase_gate(alg, reg, theta_target, Qubit::lower, Axis::y);

    ojson steps = ojson::array();

    // Tare.
    {
        MeasurementConfig tare =
            compile_measurement(device, {l1, l2, l3, u1, u2, u3}, "tare");
        ojson s;
        s["step_type"] = "tare";
        s["label"] = "tare";
        s["config"] = tare.to_json(device);
        s["expected_operator"] = join_names(tare.op.mzms);
        s["notes"] = "couple every island to the bus and record the total "
                     "parity; all later ground-side parities are inferred "
                     "against this record";
        steps.push_back(std::move(s));
    }

    // Two entangling initializations with forced -1 outcomes.
    const struct {
        const char* label;
        std::vector<std::string> target;
        std::vector<std::string> aux;
    } inits[2] = {
        {"init-1", {l1, u1}, {l1, l3}},
        {"init-2", {l2, u2}, {l2, l3}},
    };
    for (const auto& init : inits) {
        MeasurementConfig cfg =
            compile_measurement(device, init.target, init.label);
        MeasurementConfig aux = compile_measurement(
            device, init.aux, std::string(init.label) + " recovery");
        ojson s;
        s["step_type"] = "initialize";
        s["label"] = init.label;
        s["config"] = cfg.to_json(device);
        s["expected_operator"] = join_names(cfg.op.mzms);
        s["forced_outcome"] = -1;
        s["recovery"] = ojson{
            {"config", aux.to_json(device)},
            {"operator", join_names(aux.op.mzms)},
            {"notes", "on a +1 outcome, measure this recovery pair and retry "
                      "the target measurement"}};
        steps.push_back(std::move(s));
    }

    // Phase-gate step.
    {
        ojson s;
        s["step_type"] = "phase_gate";
        s["label"] = "phase gate";
        ojson states = ojson::object();
        ojson couplings = ojson::object();
        for (const auto& info : device.junctions) {
            const bool open = std::find(device.gate_open.begin(),
                                        device.gate_open.end(),
                                        info.name) != device.gate_open.end();
            if (info.kind == JunctionKind::tunable) {
                states[info.name] = "coupling";
                const double value = info.role == "J1"   ? gate_params.j1
                                     : info.role == "J2" ? gate_params.j2
                                                         : gate_params.j();
                couplings[info.name] = value;
            } else if (info.kind == JunctionKind::fixed_strong) {
                states[info.name] = "on";
            } else {
                states[info.name] = open ? "off" : "on";
            }
        }
        s["junction_states"] = std::move(states);
        s["couplings_over_j"] = std::move(couplings);
        s["flux_ramp_rad"] = ojson::array({0.0, 2.0 * pi});
        s["release"] = "ramp the J2 junction to zero coupling before "
                       "reconnecting the measurement junctions";
        s["epsilon"] = eps;
        s["beta_rad"] = beta;
        s["gate_charge_q_plus"] = q_plus;
        s["instanton_d"] = pred.d;
        s["gate_phase_rad"] = pred.gate_phase_2theta;
        s["theta_rad"] = theta_target;
        s["axis"] = "lower y";
        s["notes"] = "junctions 2 and 3 open so flux passes freely; the "
                     "lower-right loop acts as the gate SQUID";
        steps.push_back(std::move(s));
    }

    // Four correlator rounds.
    const struct {
        char lower;
        char upper;
        int sign;
    } rounds[4] = {{'x', 'X', +1}, {'x', 'Z', -1}, {'z', 'X', +1},
                   {'z', 'Z', +1}};
    double chsh = 0.0;
    for (const auto& r : rounds) {
        const std::string lower_label = std::string("lower ") + r.lower;
        const std::string upper_label = std::string("upper ") + r.upper;
        MeasurementConfig lower_cfg = compile_measurement(
            device, pauli_target(device, "lower", r.lower), lower_label);
        MeasurementConfig upper_cfg = compile_measurement(
            device, pauli_target(device, "upper", r.upper), upper_label);
        const double corr = pauli_correlator(alg, reg, axis_from_char(r.lower),
                                             axis_from_char(r.upper));
        chsh += r.sign * corr;
        ojson s;
        s["step_type"] = "measure";
        s["label"] = std::string(1, r.lower) + " * " + std::string(1, r.upper);
        s["sign_in_chsh"] = r.sign;
        s["lower_config"] = lower_cfg.to_json(device);
        s["upper_config"] = upper_cfg.to_json(device);
        s["expected_correlator"] = corr;
        steps.push_back(std::move(s));
    }

    ojson summary;
    summary["step_type"] = "summary";
    summary["theta_rad"] = theta_target;
    summary["epsilon"] = eps;
    summary["chsh_expected"] = chsh;
    summary["chsh_formula"] = chsh_predicted(theta_target);
    steps.push_back(std::move(summary));
    return steps;
}

MeasurementConfig compile_named_target(const DeviceGraph& device,
                                       const std::string& key) {
    struct Named {
        const char* key;
        const char* label;
        std::vector<std::pair<const char*, int>> roles;
    };
    static const std::vector<Named> table = {
        {"tare", "tare",
         {{"lower", 1}, {"lower", 2}, {"lower", 3},
          {"upper", 1}, {"upper", 2}, {"upper", 3}}},
        {"init1", "init-1", {{"lower", 1}, {"upper", 1}}},
        {"init2", "init-2", {{"lower", 2}, {"upper", 2}}},
        {"upperX", "upper X", {{"upper", 2}, {"upper", 3}}},
        {"upperZ", "upper Z", {{"upper", 1}, {"upper", 2}}},
        {"lowerx", "lower x", {{"lower", 2}, {"lower", 3}}},
        {"lowerz", "lower z", {{"lower", 1}, {"lower", 2}}},
    };
    for (const auto& entry : table) {
        if (key != entry.key) continue;
        std::vector<std::string> target;
        for (const auto& [qubit, index] : entry.roles) {
            const MzmInfo* m = device.mzm_by_role(qubit, index);
            if (m == nullptr)
                throw ConfigError("device '" + device.name + "' has no mzm (" +
                                  qubit + ", " + std::to_string(index) + ")");
            target.push_back(m->name);
        }
        return compile_measurement(device, target, entry.label);
    }
    throw ConfigError("unknown protocol target '" + key + "' (expected tare, "
                      "init1, init2, upperX, upperZ, lowerx, or lowerz)");
}

ojson measurement_report(const DeviceGraph& device, const std::string& target,
                         const MeasurementConfig& cfg) {
    ojson j;
    j["tool"] = std::string("vgate ") + version;
    j["device"] = device.name;
    j["target"] = target;
    ojson body = cfg.to_json(device);
    for (auto& [key, value] : body.items()) j[key] = std::move(value);
    return j;
}

} // namespace vgate
