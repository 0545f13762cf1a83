// Directed observation networks. An edge i -> j means "i observes j",
// i.e. j is in i's neighborhood N_i. Every agent observes itself; custom
// edge lists get the self-loop added (with a warning) when it is missing.
//
// Connectivity analysis: Tarjan strongly connected components, plus
// extraction of sink components (strongly connected sets closed under
// observation), whose internal dynamics are autonomous.
#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "netlearn/common.hpp"

namespace netlearn {

enum class Topology { complete, star, ring, autarky, custom };

inline const char* to_string(Topology k) {
    switch (k) {
        case Topology::complete: return "complete";
        case Topology::star: return "star";
        case Topology::ring: return "ring";
        case Topology::autarky: return "autarky";
        case Topology::custom: return "custom";
    }
    return "?";
}

inline Topology topology_from_string(const std::string& s) {
    if (s == "complete") return Topology::complete;
    if (s == "star") return Topology::star;
    if (s == "ring") return Topology::ring;
    if (s == "autarky") return Topology::autarky;
    if (s == "custom") return Topology::custom;
    throw ConfigError("unknown topology '" + s + "'");
}

class Network {
public:
    Network(std::size_t n, std::vector<std::vector<std::uint32_t>> neighbors)
        : n_(n), neighbors_(std::move(neighbors)) {
        if (n_ < 1) throw ConfigError("network: need at least one agent");
        if (neighbors_.size() != n_) throw ConfigError("network: neighbor list size mismatch");
        for (std::size_t i = 0; i < n_; ++i) {
            auto& nb = neighbors_[i];
            std::sort(nb.begin(), nb.end());
            nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
            for (auto j : nb)
                if (j >= n_) throw ConfigError("network: neighbor index out of range");
            if (!std::binary_search(nb.begin(), nb.end(), static_cast<std::uint32_t>(i)))
                throw ConfigError("network: agent " + std::to_string(i + 1) +
                                  " is missing its self-loop");
        }
    }

    std::size_t size() const { return n_; }
    const std::vector<std::uint32_t>& neighbors(std::size_t i) const { return neighbors_[i]; }
    bool observes(std::size_t i, std::size_t j) const {
        return std::binary_search(neighbors_[i].begin(), neighbors_[i].end(),
                                  static_cast<std::uint32_t>(j));
    }

    bool is_complete() const {
        for (std::size_t i = 0; i < n_; ++i)
            if (neighbors_[i].size() != n_) return false;
        return true;
    }

    // Star shape: one agent observes everyone, every other agent only itself.
    // Returns the center index, or -1 when the network is not a star.
    // A complete network of size 1 counts as a (degenerate) star.
    long star_center() const {
        long center = -1;
        for (std::size_t i = 0; i < n_; ++i) {
            if (neighbors_[i].size() == n_) {
                if (center >= 0 && n_ > 1) return -1; // two full observers
                if (center < 0) center = static_cast<long>(i);
            } else if (neighbors_[i].size() != 1) {
                return -1;
            }
        }
        return center;
    }

    bool operator==(const Network&) const = default;

private:
    std::size_t n_;
    std::vector<std::vector<std::uint32_t>> neighbors_;
};

inline Network make_topology(Topology kind, std::size_t n,
                             const std::vector<std::pair<std::uint32_t, std::uint32_t>>* edges = nullptr,
                             std::vector<std::string>* warnings = nullptr) {
    if (n < 1) throw ConfigError("make_topology: need n >= 1");
    std::vector<std::vector<std::uint32_t>> nb(n);
    switch (kind) {
        case Topology::complete:
            for (std::size_t i = 0; i < n; ++i) {
                nb[i].resize(n);
                for (std::size_t j = 0; j < n; ++j) nb[i][j] = static_cast<std::uint32_t>(j);
            }
            break;
        case Topology::star:
            // Agent 1 observes everyone; peripheral agents observe only themselves.
            for (std::size_t j = 0; j < n; ++j) nb[0].push_back(static_cast<std::uint32_t>(j));
            for (std::size_t i = 1; i < n; ++i) nb[i] = {static_cast<std::uint32_t>(i)};
            break;
        case Topology::ring:
            // Each agent observes itself and its predecessor (agent 1 wraps to n).
            for (std::size_t i = 0; i < n; ++i) {
                nb[i].push_back(static_cast<std::uint32_t>(i));
                nb[i].push_back(static_cast<std::uint32_t>((i + n - 1) % n));
            }
            break;
        case Topology::autarky:
            for (std::size_t i = 0; i < n; ++i) nb[i] = {static_cast<std::uint32_t>(i)};
            break;
        case Topology::custom: {
            if (edges == nullptr)
                throw ConfigError("custom topology requires an edge list");
            for (const auto& [from, to] : *edges) {
                if (from < 1 || from > n || to < 1 || to > n)
                    throw ConfigError("custom edge (" + std::to_string(from) + "," +
                                      std::to_string(to) + ") out of range for n=" +
                                      std::to_string(n));
                nb[from - 1].push_back(to - 1);
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (std::find(nb[i].begin(), nb[i].end(), static_cast<std::uint32_t>(i)) ==
                    nb[i].end()) {
                    nb[i].push_back(static_cast<std::uint32_t>(i));
                    if (warnings)
                        warnings->push_back("agent " + std::to_string(i + 1) +
                                            ": self-loop was missing and has been added");
                }
            }
            break;
        }
    }
    return Network(n, std::move(nb));
}

// Tarjan's algorithm, iterative. Components are returned with members sorted
// and the component list ordered by smallest member, ascending.
inline std::vector<std::vector<std::uint32_t>> strongly_connected_components(const Network& net) {
    const std::size_t n = net.size();
    std::vector<std::int32_t> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::uint32_t> stack;
    std::vector<std::vector<std::uint32_t>> comps;
    std::int32_t counter = 0;

    struct Frame {
        std::uint32_t v;
        std::size_t edge;
    };
    std::vector<Frame> call;

    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        call.push_back({root, 0});
        while (!call.empty()) {
            Frame& f = call.back();
            const std::uint32_t v = f.v;
            if (f.edge == 0) {
                index[v] = low[v] = counter++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            bool descended = false;
            const auto& nb = net.neighbors(v);
            while (f.edge < nb.size()) {
                const std::uint32_t w = nb[f.edge++];
                if (index[w] < 0) {
                    call.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[v] = std::min(low[v], index[w]);
            }
            if (descended) continue;
            if (low[v] == index[v]) {
                std::vector<std::uint32_t> comp;
                std::uint32_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp.push_back(w);
                } while (w != v);
                std::sort(comp.begin(), comp.end());
                comps.push_back(std::move(comp));
            }
            call.pop_back();
            if (!call.empty()) {
                Frame& parent = call.back();
                low[parent.v] = std::min(low[parent.v], low[v]);
            }
        }
    }
    std::sort(comps.begin(), comps.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return comps;
}

inline bool is_strongly_connected(const Network& net) {
    return strongly_connected_components(net).size() == 1;
}

// Strongly connected components closed under observation: no member observes
// anyone outside the component. The learning dynamics inside such a set do
// not depend on the rest of the network.
inline std::vector<std::vector<std::uint32_t>> sink_components(const Network& net) {
    std::vector<std::vector<std::uint32_t>> out;
    for (auto& comp : strongly_connected_components(net)) {
        bool closed = true;
        for (auto i : comp) {
            for (auto j : net.neighbors(i)) {
                if (!std::binary_search(comp.begin(), comp.end(), j)) {
                    closed = false;
                    break;
                }
            }
            if (!closed) break;
        }
        if (closed) out.push_back(std::move(comp));
    }
    return out;
}

} // namespace netlearn
