#include "pomdp/serialize.hpp"

#include "pomdp/errors.hpp"

namespace pomdp {

using nlohmann::json;

namespace {

template <class F>
auto parsing(const char* what, F&& body) {
    try {
        return body();
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad ") + what + " document: " + e.what());
    }
}

using Table = std::vector<std::vector<double>>;

Table rows_of(const std::vector<double>& flat, int rows, int cols) {
    Table out(static_cast<std::size_t>(rows), std::vector<double>(static_cast<std::size_t>(cols)));
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) out[r][c] = flat[static_cast<std::size_t>(r) * cols + c];
    }
    return out;
}

std::vector<double> flatten(const Table& t, int rows, int cols, const char* what) {
    if (static_cast<int>(t.size()) != rows) throw ValidationError(std::string(what) + ": wrong row count");
    std::vector<double> flat;
    for (const auto& row : t) {
        if (static_cast<int>(row.size()) != cols) throw ValidationError(std::string(what) + ": wrong row length");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return flat;
}

}  // namespace

json pwlc_to_json(const PwlcFn& f) {
    json vecs = json::array();
    for (const auto& v : f.vectors) {
        json e{{"coeffs", v.coeffs}, {"action", v.action}};
        if (!v.witnesses.empty()) e["witnesses"] = v.witnesses;
        vecs.push_back(std::move(e));
    }
    return {{"vectors", vecs}};
}

PwlcFn pwlc_from_json(const json& doc) {
    return parsing("alpha-set", [&] {
        PwlcFn f;
        for (const auto& e : doc.at("vectors")) {
            AlphaVector v;
            v.coeffs = e.at("coeffs").get<std::vector<double>>();
            v.action = e.value("action", -1);
            if (e.contains("witnesses")) v.witnesses = e.at("witnesses").get<std::vector<int>>();
            if (!f.empty() && v.coeffs.size() != f.vectors.front().coeffs.size()) {
                throw ValidationError("alpha vectors of different lengths");
            }
            f.vectors.push_back(std::move(v));
        }
        return f;
    });
}

json fsm_to_json(const FsmController& c) {
    json doc{{"action", c.action}, {"next", c.next}};
    if (c.evaluated()) doc["values"] = c.values;
    return doc;
}

FsmController fsm_from_json(const json& doc) {
    return parsing("controller", [&] {
        FsmController c;
        c.action = doc.at("action").get<std::vector<int>>();
        c.next = doc.at("next").get<std::vector<std::vector<int>>>();
        if (doc.contains("values")) c.values = doc.at("values").get<Table>();
        if (c.next.size() != c.action.size() || (c.evaluated() && c.values.size() != c.action.size())) {
            throw ValidationError("controller tables disagree on the number of memory states");
        }
        return c;
    });
}

json grid_to_json(const GridValueFn& g) {
    return {{"num_states", g.grid.num_states()},
            {"rule", grid_rule_name(g.rule)},
            {"sigma", g.sigma},
            {"points", g.grid.points()},
            {"values", g.values}};
}

GridValueFn grid_from_json(const json& doc) {
    return parsing("grid", [&] {
        GridValueFn g;
        const int n = doc.at("num_states").get<int>();
        const auto points = doc.at("points").get<std::vector<Belief>>();
        for (const auto& b : points) validate_belief(b, n);
        g.grid = Grid(n, points);
        g.values = doc.at("values").get<std::vector<double>>();
        g.rule = parse_grid_rule(doc.value("rule", std::string("sawtooth")));
        g.sigma = doc.value("sigma", 0.25);
        if (static_cast<int>(g.values.size()) != g.grid.size()) {
            throw ValidationError("grid values and points differ in count (duplicate points?)");
        }
        return g;
    });
}

json qtable_to_json(const QTable& q) {
    return {{"num_states", q.num_states},
            {"num_actions", q.num_actions},
            {"q", rows_of(q.q, q.num_states, q.num_actions)},
            {"v", q.v}};
}

QTable qtable_from_json(const json& doc) {
    return parsing("Q-table", [&] {
        QTable q;
        q.num_states = doc.at("num_states").get<int>();
        q.num_actions = doc.at("num_actions").get<int>();
        q.q = flatten(doc.at("q").get<Table>(), q.num_states, q.num_actions, "Q-table");
        q.v = doc.at("v").get<std::vector<double>>();
        if (static_cast<int>(q.v.size()) != q.num_states) throw ValidationError("Q-table: wrong value count");
        return q;
    });
}

json fib_to_json(const FibTable& t) {
    return {{"num_states", t.num_states},
            {"num_actions", t.num_actions},
            {"alpha", rows_of(t.alpha, t.num_states, t.num_actions)},
            {"bellman_error", t.bellman_error},
            {"iterations", t.iterations}};
}

FibTable fib_from_json(const json& doc) {
    return parsing("FIB table", [&] {
        FibTable t;
        t.num_states = doc.at("num_states").get<int>();
        t.num_actions = doc.at("num_actions").get<int>();
        t.alpha = flatten(doc.at("alpha").get<Table>(), t.num_states, t.num_actions, "FIB table");
        t.bellman_error = doc.value("bellman_error", 0.0);
        t.iterations = doc.value("iterations", 0);
        return t;
    });
}

json fit_model_to_json(const FitModel& mdl) {
    if (const auto* lq = std::get_if<LinearQModel>(&mdl)) return {{"kind", "linq"}, {"weights", lq->weights}};
    const auto& sm = std::get<SoftmaxModel>(mdl);
    return {{"kind", "softmax"}, {"k", sm.k}, {"vectors", sm.vectors}};
}

FitModel fit_model_from_json(const json& doc) {
    return parsing("fitted model", [&]() -> FitModel {
        const std::string kind = doc.at("kind").get<std::string>();
        if (kind == "linq") return LinearQModel{doc.at("weights").get<Table>()};
        if (kind == "softmax") return SoftmaxModel{doc.at("vectors").get<Table>(), doc.at("k").get<double>()};
        throw ParseError("unknown fitted model kind: " + kind);
    });
}

}  // namespace pomdp
