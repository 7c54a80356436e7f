// Copyright 2026 The fiberloom Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fiberloom/scenario.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

namespace fiberloom {
namespace {

constexpr const char *kHeader = "fiberloom/1";
constexpr int kMaxAmplitudeQubits = 12;
constexpr double kFidelityTol = 1e-10;

// The YAML body starts on the second line of the file.
int file_line(const YAML::Mark &m) { return m.line < 0 ? 0 : m.line + 2; }

class Reader {
   public:
    Reader(std::string origin, YAML::Node root) : origin_(std::move(origin)), root_(std::move(root)) {}

    [[noreturn]] void fail(const YAML::Node &at, const std::string &field, const std::string &what) const {
        throw ScenarioError(origin_, at ? file_line(at.Mark()) : 0, field, what);
    }

    YAML::Node required(const std::string &field) const {
        const YAML::Node n = root_[field];
        if (!n) {
            throw ScenarioError(origin_, 0, field, "missing required field '" + field + "'");
        }
        return n;
    }

    YAML::Node optional(const std::string &field) const { return root_[field]; }

    template <typename T>
    T as(const YAML::Node &n, const std::string &field, const char *type) const {
        try {
            return n.as<T>();
        } catch (const YAML::Exception &) {
            fail(n, field, "field '" + field + "' must be " + type);
        }
    }

    double angle(const YAML::Node &n, const std::string &field) const {
        if (!n.IsScalar()) {
            fail(n, field, "field '" + field + "' must be an angle");
        }
        const std::string s = n.Scalar();
        // plain numbers, or multiples of pi such as "pi/2", "-0.25pi", "3*pi/4"
        static const std::regex pi_form(R"(^\s*([-+]?(?:\d+\.?\d*|\.\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$)");
        std::smatch m;
        if (std::regex_match(s, m, pi_form)) {
            double k = 1.0;
            const std::string c = m[1].str();
            if (c == "-") {
                k = -1.0;
            } else if (!c.empty() && c != "+") {
                k = std::stod(c);
            }
            const double d = m[2].matched ? std::stod(m[2].str()) : 1.0;
            return k * std::numbers::pi / d;
        }
        return as<double>(n, field, "an angle (number or multiple of pi)");
    }

    std::vector<int> int_list(const YAML::Node &n, const std::string &field) const {
        if (!n.IsSequence()) {
            fail(n, field, "field '" + field + "' must be a list of integers");
        }
        std::vector<int> out;
        for (const auto &x : n) {
            out.push_back(as<int>(x, field, "a list of integers"));
        }
        return out;
    }

    const std::string &origin() const { return origin_; }
    const YAML::Node &root() const { return root_; }

   private:
    std::string origin_;
    YAML::Node root_;
};

const std::set<std::string> kKnownFields{"name",    "kind",  "gate",    "input",  "graph", "vertices", "fuse",
                                         "chain",   "thetas", "steps",  "outputs", "backend", "qubit", "trials",
                                         "seed",    "loss"};

GraphState read_graph(const Reader &r, const YAML::Node &edges) {
    if (!edges.IsSequence()) {
        r.fail(edges, "graph", "field 'graph' must be a list of [a, b] edges");
    }
    GraphState g;
    if (const YAML::Node vs = r.optional("vertices")) {
        g = GraphState::isolated(r.int_list(vs, "vertices"));
    }
    for (const auto &e : edges) {
        const std::vector<int> ab = r.int_list(e, "graph");
        if (ab.size() != 2) {
            r.fail(e, "graph", "each edge in 'graph' needs exactly two vertices");
        }
        if (ab[0] == ab[1]) {
            r.fail(e, "graph", "self-loop on vertex " + std::to_string(ab[0]));
        }
        for (int v : ab) {
            if (!g.contains(v)) {
                g = g.with_vertex(v);
            }
        }
        if (!g.has_edge(ab[0], ab[1])) {
            g = apply_cz(g, ab[0], ab[1]);
        }
    }
    if (g.vertices().empty()) {
        r.fail(edges, "graph", "graph has no vertices");
    }
    return g;
}

std::set<int> read_deps(const Reader &r, const YAML::Node &parent, const std::string &key) {
    const YAML::Node n = parent[key];
    if (!n) {
        return {};
    }
    const auto v = r.int_list(n, key);
    return {v.begin(), v.end()};
}

MeasurementPattern read_pattern(const Reader &r, Scenario &s) {
    const YAML::Node chain = r.optional("chain");
    const YAML::Node steps = r.optional("steps");
    if (chain && steps) {
        r.fail(steps, "steps", "give either 'chain' with 'thetas' or 'steps' with 'outputs', not both");
    }
    if (chain) {
        const std::vector<int> vs = r.int_list(chain, "chain");
        const YAML::Node th = r.required("thetas");
        if (!th.IsSequence()) {
            r.fail(th, "thetas", "field 'thetas' must be a list of angles");
        }
        std::vector<double> thetas;
        for (const auto &t : th) {
            thetas.push_back(r.angle(t, "thetas"));
        }
        if (vs.size() < 2 || thetas.size() + 1 != vs.size()) {
            r.fail(th, "thetas", "a chain of n vertices needs n - 1 angles (n >= 2)");
        }
        if (!s.graph) {
            s.graph = GraphState::chain(vs);
        }
        return linear_chain_pattern(vs, thetas);
    }
    if (!steps) {
        r.required("chain");  // names the preferred form in the diagnostic
    }
    if (!steps.IsSequence()) {
        r.fail(steps, "steps", "field 'steps' must be a list");
    }
    MeasurementPattern p;
    for (const auto &st : steps) {
        if (!st["vertex"]) {
            r.fail(st, "steps.vertex", "each step needs a 'vertex'");
        }
        MeasurementStep m;
        m.vertex = r.as<int>(st["vertex"], "steps.vertex", "an integer");
        m.theta = st["theta"] ? r.angle(st["theta"], "steps.theta") : 0.0;
        m.sign_deps = read_deps(r, st, "sign_deps");
        p.steps.push_back(m);
    }
    const YAML::Node outs = r.required("outputs");
    if (!outs.IsSequence()) {
        r.fail(outs, "outputs", "field 'outputs' must be a list");
    }
    for (const auto &o : outs) {
        if (!o["vertex"]) {
            r.fail(o, "outputs.vertex", "each output needs a 'vertex'");
        }
        p.outputs.push_back(OutputCorrection{r.as<int>(o["vertex"], "outputs.vertex", "an integer"), read_deps(r, o, "x_deps"),
                                             read_deps(r, o, "z_deps")});
    }
    try {
        p.validate();
    } catch (const std::invalid_argument &e) {
        r.fail(steps, "steps", e.what());
    }
    if (!s.graph) {
        r.required("graph");
    }
    return p;
}

std::string fmt(double x) {
    if (std::abs(x) < 5e-13) {
        x = 0.0;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string fixed(double x) {
    if (std::abs(x) < 5e-13) {
        x = 0.0;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12f", x);
    return buf;
}

EncodedState two_seeds() {
    const EncodedState a = make_seed_cluster(0, 1, 0, 1);
    const EncodedState b = make_seed_cluster(2, 3, 2, 3);
    EncodedState j{tensor(a.state, b.state), a.frame};
    j.frame.insert(b.frame.begin(), b.frame.end());
    return j;
}

EncodedState named_or_graph(const Scenario &s) {
    if (s.graph) {
        return encode_graph(*s.graph);
    }
    return s.input == "seed" ? make_seed_cluster() : two_seeds();
}

std::vector<std::string> letters_for(const QubitFrame &f) {
    std::vector<std::string> out;
    for (const auto &kv : f) {
        out.push_back(kv.second.encoding == Encoding::TimeBin ? "sl" : "HV");
    }
    return out;
}

void add_block(ScenarioResult &r, const std::string &heading, const EncodedState &s) {
    const int n = static_cast<int>(s.frame.size());
    if (n == 0 || n > kMaxAmplitudeQubits) {
        return;
    }
    r.amplitudes.emplace_back(heading, labeled_amplitudes(decode(s), letters_for(s.frame), n));
}

int top_rail(const EncodedState &s) {
    int top = -1;
    for (const auto &kv : s.frame) {
        top = std::max(top, kv.second.rail);
    }
    for (const Mode &m : s.state.occupied_modes()) {
        top = std::max(top, m.rail);
    }
    return top;
}

// Merges incoherent branches sharing a label, keeping first-seen order.
struct Tally {
    std::vector<ScenarioOutcome> rows;
    std::map<std::string, std::size_t> index;

    std::size_t add(const std::string &label, bool success, double exact) {
        auto [it, fresh] = index.emplace(label, rows.size());
        if (fresh) {
            rows.push_back(ScenarioOutcome{label, success, 0, 0.0});
        }
        rows[it->second].exact += exact;
        return it->second;
    }
};

void sort_rows(std::vector<ScenarioOutcome> &rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const auto &a, const auto &b) { return a.label < b.label; });
}

ScenarioResult execute_fusion(const Scenario &s) {
    const FusionKind kind = fusion_kind_from_string(s.gate);
    const EncodedState joint = named_or_graph(s);
    const auto [qa, qb] = s.fuse;
    const auto branches = fuse(kind, joint, qa, qb);
    const int top = top_rail(joint);
    const double eta = s.loss.transmission(build_fusion(kind, joint.frame.at(qa), joint.frame.at(qb), top + 1, top + 2).circuit);

    ScenarioResult r;
    Tally t;
    std::vector<std::size_t> row_of;
    for (const auto &b : branches) {
        row_of.push_back(t.add(b.outcome, b.success, eta * b.probability));
    }
    std::optional<std::size_t> lost;
    if (eta < 1.0) {
        lost = t.add("LOST", false, 1.0 - eta);
    }

    std::vector<double> weights;
    for (const auto &b : branches) {
        weights.push_back(b.probability);
    }
    for (int trial = 0; trial < s.trials; ++trial) {
        auto rng = trial_rng(s.seed, static_cast<std::uint64_t>(trial));
        if (lost && std::bernoulli_distribution(1.0 - eta)(rng)) {
            ++t.rows[*lost].count;
            continue;
        }
        std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
        ++t.rows[row_of[pick(rng)]].count;
    }

    std::set<std::string> shown;
    for (const auto &b : branches) {
        if (b.success && shown.insert(b.outcome).second) {
            add_block(r, b.outcome + "  byproduct " + b.byproduct.str(), b.post);
        }
    }
    long long wins = 0;
    double exact = 0;
    for (const auto &row : t.rows) {
        if (row.success) {
            wins += row.count;
            exact += row.exact;
        }
    }
    r.success_rate = static_cast<double>(wins) / s.trials;
    r.success_exact = exact;
    r.outcomes = std::move(t.rows);
    sort_rows(r.outcomes);
    return r;
}

ScenarioResult execute_state(const Scenario &s) {
    ScenarioResult r;
    add_block(r, "", named_or_graph(s));
    return r;
}

std::string history_label(const std::vector<int> &outcomes) {
    std::string out = "m=";
    for (int m : outcomes) {
        out += static_cast<char>('0' + m);
    }
    return out;
}

ScenarioResult execute_pattern(const Scenario &s) {
    const auto runs = enumerate_runs(s.pattern, *s.graph, s.backend);
    ScenarioResult r;
    Tally t;
    for (const auto &run_rec : runs) {
        t.add(history_label(run_rec.outcomes), true, run_rec.probability);
    }
    for (int trial = 0; trial < s.trials; ++trial) {
        auto rng = trial_rng(s.seed, static_cast<std::uint64_t>(trial));
        const RunRecord rec = run(s.pattern, *s.graph, s.backend, rng());
        ++t.rows[t.add(history_label(rec.outcomes), true, 0.0)].count;
    }
    for (const auto &run_rec : runs) {
        if (vector_fidelity(run_rec.final_state, runs.front().final_state) < 1.0 - kFidelityTol) {
            r.deterministic = false;
        }
    }
    const auto &first = runs.front();
    const int n = static_cast<int>(first.output_order.size());
    if (n > 0 && n <= kMaxAmplitudeQubits) {
        std::string heading;
        if (!r.deterministic) {
            heading = history_label(first.outcomes);
        }
        r.amplitudes.emplace_back(heading, labeled_amplitudes(first.final_state, std::vector<std::string>(n, "01"), n));
    }
    r.outcomes = std::move(t.rows);
    sort_rows(r.outcomes);
    return r;
}

ScenarioResult execute_circuit(const Scenario &s) {
    const OpticalCircuit c = catalog_circuit(s.gate);
    const EncodedState in = encode(s.qubit, c.input);
    const auto branches = run_circuit(c, in);
    const double eta = s.loss.transmission(c);
    ScenarioResult r;
    Tally t;
    std::vector<std::size_t> row_of;
    std::vector<double> weights;
    for (const auto &b : branches) {
        const std::string label = c.detectors.empty() ? "pass" : b.label(c.detectors);
        row_of.push_back(t.add(label, true, eta * b.probability));
        weights.push_back(b.probability);
        if (!b.post.frame.empty()) {
            add_block(r, c.detectors.empty() ? "" : label, b.post);
        }
    }
    std::optional<std::size_t> lost;
    if (eta < 1.0) {
        lost = t.add("LOST", false, 1.0 - eta);
    }
    for (int trial = 0; trial < s.trials; ++trial) {
        auto rng = trial_rng(s.seed, static_cast<std::uint64_t>(trial));
        if (lost && std::bernoulli_distribution(1.0 - eta)(rng)) {
            ++t.rows[*lost].count;
            continue;
        }
        std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
        ++t.rows[row_of[pick(rng)]].count;
    }
    r.outcomes = std::move(t.rows);
    sort_rows(r.outcomes);
    return r;
}

void write_file(const std::filesystem::path &p, const std::string &text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + p.string());
    }
    out << text;
}

}  // namespace

ScenarioError::ScenarioError(const std::string &origin, int line_no, const std::string &field_name,
                             const std::string &what)
    : std::runtime_error(origin + (line_no > 0 ? ":" + std::to_string(line_no) : std::string()) + ": " + what),
      field(field_name),
      line(line_no) {}

std::string to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::Fusion:
            return "fusion";
        case ScenarioKind::State:
            return "state";
        case ScenarioKind::Pattern:
            return "pattern";
        case ScenarioKind::Circuit:
            return "circuit";
    }
    return "?";
}

Scenario parse_scenario(const std::string &text, const std::string &origin) {
    const auto eol = text.find('\n');
    std::string first = text.substr(0, eol);
    while (!first.empty() && (first.back() == '\r' || first.back() == ' ')) {
        first.pop_back();
    }
    if (first != kHeader) {
        throw ScenarioError(origin, 1, "header", std::string("first line must be '") + kHeader + "'");
    }
    YAML::Node root;
    try {
        root = YAML::Load(eol == std::string::npos ? std::string() : text.substr(eol + 1));
    } catch (const YAML::ParserException &e) {
        throw ScenarioError(origin, file_line(e.mark), "yaml", e.msg);
    }
    if (!root.IsMap()) {
        throw ScenarioError(origin, 2, "document", "scenario body must be a mapping of fields");
    }
    const Reader r(origin, root);
    for (const auto &kv : root) {
        const std::string key = kv.first.Scalar();
        if (!kKnownFields.contains(key)) {
            r.fail(kv.first, key, "unknown field '" + key + "'");
        }
    }

    Scenario s;
    s.name = r.as<std::string>(r.required("name"), "name", "a string");
    if (s.name.empty() || s.name.find_first_of("/\\ ") != std::string::npos) {
        r.fail(r.required("name"), "name", "field 'name' must be a non-empty word usable as a file name");
    }
    const YAML::Node kind = r.required("kind");
    const std::string k = r.as<std::string>(kind, "kind", "a string");
    if (k == "fusion") {
        s.kind = ScenarioKind::Fusion;
    } else if (k == "state") {
        s.kind = ScenarioKind::State;
    } else if (k == "pattern") {
        s.kind = ScenarioKind::Pattern;
    } else if (k == "circuit") {
        s.kind = ScenarioKind::Circuit;
    } else {
        r.fail(kind, "kind", "field 'kind' must be one of fusion, state, pattern, circuit");
    }

    const YAML::Node trials = r.required("trials");
    s.trials = r.as<int>(trials, "trials", "an integer");
    if (s.trials < 1) {
        r.fail(trials, "trials", "field 'trials' must be at least 1");
    }
    s.seed = r.as<std::uint64_t>(r.required("seed"), "seed", "a non-negative integer");

    if (const YAML::Node loss = r.optional("loss")) {
        if (s.kind == ScenarioKind::State || s.kind == ScenarioKind::Pattern) {
            r.fail(loss, "loss", "field 'loss' applies only to fusion and circuit scenarios");
        }
        if (!loss.IsMap()) {
            r.fail(loss, "loss", "field 'loss' must map element kinds to probabilities");
        }
        for (const auto &kv : loss) {
            const double p = r.as<double>(kv.second, "loss", "a probability");
            if (!(p >= 0.0 && p < 1.0)) {
                r.fail(kv.second, "loss", "loss probabilities must lie in [0, 1)");
            }
            s.loss.per_kind[kv.first.Scalar()] = p;
        }
    }

    if (const YAML::Node g = r.optional("graph")) {
        s.graph = read_graph(r, g);
    }
    if (const YAML::Node in = r.optional("input")) {
        s.input = r.as<std::string>(in, "input", "a string");
        if (s.input != "seed" && s.input != "seed_pair") {
            r.fail(in, "input", "field 'input' must be 'seed' or 'seed_pair'");
        }
        if (s.graph) {
            r.fail(in, "input", "give either 'input' or 'graph', not both");
        }
    }

    switch (s.kind) {
        case ScenarioKind::Fusion: {
            const YAML::Node gate = r.required("gate");
            s.gate = r.as<std::string>(gate, "gate", "a string");
            try {
                fusion_kind_from_string(s.gate);
            } catch (const std::invalid_argument &) {
                r.fail(gate, "gate", "unknown fusion gate '" + s.gate + "'");
            }
            if (!s.graph && s.input.empty()) {
                r.required("input");
            }
            if (s.input == "seed") {
                r.fail(r.optional("input"), "input", "a fusion needs 'seed_pair' or a graph");
            }
            if (const YAML::Node f = r.optional("fuse")) {
                const auto ab = r.int_list(f, "fuse");
                if (ab.size() != 2) {
                    r.fail(f, "fuse", "field 'fuse' must list two qubits");
                }
                s.fuse = {ab[0], ab[1]};
            } else if (s.graph) {
                r.required("fuse");
            }
            const std::set<int> qubits = s.graph ? s.graph->vertices() : std::set<int>{0, 1, 2, 3};
            if (!qubits.contains(s.fuse.first) || !qubits.contains(s.fuse.second) || s.fuse.first == s.fuse.second) {
                r.fail(r.optional("fuse"), "fuse", "fused qubits must be two distinct qubits of the input");
            }
            if (qubits.size() > 4) {
                r.fail(r.optional("graph"), "graph", "fusion scenarios simulate at most 4 photons");
            }
            break;
        }
        case ScenarioKind::State:
            if (!s.graph && s.input.empty()) {
                r.required("input");
            }
            if (s.graph && s.graph->vertices().size() > kMaxAmplitudeQubits) {
                r.fail(r.optional("graph"), "graph", "state scenarios hold at most 12 qubits");
            }
            break;
        case ScenarioKind::Pattern:
            if (!s.input.empty()) {
                r.fail(r.optional("input"), "input", "pattern scenarios take a 'graph' or a 'chain'");
            }
            s.pattern = read_pattern(r, s);
            if (const YAML::Node b = r.optional("backend")) {
                try {
                    s.backend = backend_from_string(r.as<std::string>(b, "backend", "a string"));
                } catch (const std::invalid_argument &e) {
                    r.fail(b, "backend", e.what());
                }
            }
            for (const auto &st : s.pattern.steps) {
                if (!s.graph->contains(st.vertex)) {
                    r.fail(r.optional("steps") ? r.optional("steps") : r.optional("chain"), "steps",
                           "vertex " + std::to_string(st.vertex) + " is not in the graph");
                }
            }
            for (const auto &o : s.pattern.outputs) {
                if (!s.graph->contains(o.vertex)) {
                    r.fail(r.optional("outputs"), "outputs", "vertex " + std::to_string(o.vertex) + " is not in the graph");
                }
            }
            if (s.backend == Backend::Circuit && s.graph->vertices().size() > kCircuitBackendMaxPhotons) {
                r.fail(r.optional("backend"), "backend", "the CIRCUIT backend simulates at most 4 photons");
            }
            break;
        case ScenarioKind::Circuit: {
            const YAML::Node gate = r.required("gate");
            s.gate = r.as<std::string>(gate, "gate", "a string");
            OpticalCircuit c;
            try {
                c = catalog_circuit(s.gate);
            } catch (const std::out_of_range &) {
                r.fail(gate, "gate", "unknown catalog circuit '" + s.gate + "'");
            }
            if (c.input.size() != 1) {
                r.fail(gate, "gate", "circuit scenarios take one-qubit circuits; use kind 'fusion' for " + s.gate);
            }
            if (const YAML::Node q = r.optional("qubit")) {
                if (!q.IsSequence() || q.size() != 4) {
                    r.fail(q, "qubit", "field 'qubit' must be [re0, im0, re1, im1]");
                }
                std::vector<double> v;
                for (const auto &x : q) {
                    v.push_back(r.as<double>(x, "qubit", "a list of numbers"));
                }
                s.qubit = Eigen::Vector2cd(cplx(v[0], v[1]), cplx(v[2], v[3]));
                if (s.qubit.norm() < 1e-12) {
                    r.fail(q, "qubit", "field 'qubit' must not be the zero vector");
                }
                s.qubit.normalize();
            }
            break;
        }
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ScenarioError(path.string(), 0, "file", "cannot open scenario file");
    }
    std::stringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str(), path.string());
}

std::vector<std::pair<std::string, cplx>> labeled_amplitudes(const Eigen::VectorXcd &v, const std::vector<std::string> &letters,
                                                             int qubits) {
    cplx phase = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > 1e-12) {
            phase = std::conj(v[i]) / std::abs(v[i]);
            break;
        }
    }
    std::vector<std::pair<std::string, cplx>> out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        std::string label;
        for (int q = 0; q < qubits; ++q) {
            const auto bit = (static_cast<std::size_t>(i) >> (qubits - 1 - q)) & 1U;
            label += letters[static_cast<std::size_t>(q)][bit];
        }
        out.emplace_back(label, v[i] * phase);
    }
    return out;
}

ScenarioResult execute(const Scenario &s) {
    switch (s.kind) {
        case ScenarioKind::Fusion:
            return execute_fusion(s);
        case ScenarioKind::State:
            return execute_state(s);
        case ScenarioKind::Pattern:
            return execute_pattern(s);
        case ScenarioKind::Circuit:
            return execute_circuit(s);
    }
    throw std::logic_error("unhandled scenario kind");
}

std::vector<std::filesystem::path> run_scenario(const Scenario &s, const std::filesystem::path &out_dir) {
    const ScenarioResult r = execute(s);
    std::filesystem::create_directories(out_dir);

    YAML::Emitter y;
    y << YAML::BeginMap;
    y << YAML::Key << "name" << YAML::Value << s.name;
    y << YAML::Key << "kind" << YAML::Value << to_string(s.kind);
    if (!s.gate.empty()) {
        y << YAML::Key << "gate" << YAML::Value << s.gate;
    }
    if (s.kind == ScenarioKind::Pattern) {
        y << YAML::Key << "backend" << YAML::Value << to_string(s.backend);
    }
    y << YAML::Key << "trials" << YAML::Value << s.trials;
    y << YAML::Key << "seed" << YAML::Value << s.seed;
    y << YAML::Key << "outcomes" << YAML::Value << YAML::BeginSeq;
    for (const auto &o : r.outcomes) {
        const double emp = static_cast<double>(o.count) / s.trials;
        y << YAML::BeginMap;
        y << YAML::Key << "label" << YAML::Value << o.label;
        y << YAML::Key << "status" << YAML::Value << (o.success ? "success" : "failure");
        y << YAML::Key << "count" << YAML::Value << o.count;
        y << YAML::Key << "empirical" << YAML::Value << fmt(emp);
        y << YAML::Key << "exact" << YAML::Value << fmt(o.exact);
        y << YAML::Key << "sigma" << YAML::Value << fmt(std::sqrt(o.exact * (1 - o.exact) / s.trials));
        y << YAML::EndMap;
    }
    y << YAML::EndSeq;
    if (r.success_rate) {
        y << YAML::Key << "success_rate" << YAML::Value << fmt(*r.success_rate);
        y << YAML::Key << "success_exact" << YAML::Value << fmt(*r.success_exact);
    }
    if (s.kind == ScenarioKind::Pattern) {
        y << YAML::Key << "deterministic_after_corrections" << YAML::Value << r.deterministic;
    }
    y << YAML::EndMap;

    std::ostringstream amps;
    amps << kHeader << " amplitudes\n";
    for (const auto &[heading, rows] : r.amplitudes) {
        if (!heading.empty()) {
            amps << "# " << heading << "\n";
        }
        for (const auto &[label, a] : rows) {
            amps << label << " " << fixed(a.real()) << " " << fixed(a.imag()) << "\n";
        }
    }

    nlohmann::json j;
    j["format"] = kHeader;
    j["name"] = s.name;
    j["kind"] = to_string(s.kind);
    j["trials"] = s.trials;
    j["seed"] = s.seed;
    for (const auto &o : r.outcomes) {
        j["outcomes"][o.label] = {{"count", o.count}, {"exact", o.exact}, {"success", o.success}};
    }
    if (r.success_rate) {
        j["success_rate"] = *r.success_rate;
        j["success_exact"] = *r.success_exact;
        const double p = *r.success_exact;
        j["success_sigma"] = std::sqrt(p * (1 - p) / s.trials);
    }
    if (s.kind == ScenarioKind::Pattern) {
        j["deterministic_after_corrections"] = r.deterministic;
    }

    const std::vector<std::filesystem::path> paths{out_dir / (s.name + ".results"), out_dir / (s.name + ".amplitudes"),
                                                   out_dir / (s.name + ".summary.json")};
    write_file(paths[0], std::string(kHeader) + " results\n" + y.c_str() + "\n");
    write_file(paths[1], amps.str());
    j["files"] = {paths[0].filename().string(), paths[1].filename().string()};
    write_file(paths[2], j.dump(2) + "\n");
    return paths;
}

}  // namespace fiberloom
