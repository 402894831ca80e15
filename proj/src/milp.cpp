#include "vlcalloc/milp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "vlcalloc/error.hpp"

namespace vlcalloc {

namespace {

std::string idx(std::initializer_list<std::size_t> parts) {
    std::string s;
    for (auto p : parts) {
        s += '_';
        s += std::to_string(p + 1);
    }
    return s;
}

void append_number(std::string& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

}  // namespace

std::size_t MilpModel::binary_count() const {
    return static_cast<std::size_t>(
        std::count_if(variables.begin(), variables.end(), [](const auto& v) { return v.kind == VarKind::Binary; }));
}

double default_big_m(const AllocationProblem& problem) {
    double top = 0.0;
    for (double p : problem.signal) top = std::max(top, p / problem.receiver_noise);
    return 1e6 * std::max(top, 1.0);
}

MilpModel build_milp(const AllocationProblem& pr, double alpha) {
    pr.validate();
    double top = 0.0;
    for (double p : pr.signal) top = std::max(top, p / pr.receiver_noise);
    if (!(alpha > top) || !std::isfinite(alpha)) {
        std::ostringstream os;
        os << "big-M constant " << alpha << " does not dominate the largest attainable SINR " << top;
        throw Error(os.str());
    }

    MilpModel m;
    m.users = pr.users;
    m.aps = pr.aps;
    m.wavelengths = pr.wavelengths;
    m.branches = pr.branches;
    m.alpha = alpha;
    m.balance_scale = pr.receiver_noise;

    const std::size_t U = pr.users, A = pr.aps, W = pr.wavelengths, B = pr.branches;
    for (std::size_t us = 0; us < U; ++us)
        for (std::size_t ap = 0; ap < A; ++ap)
            for (std::size_t w = 0; w < W; ++w)
                for (std::size_t b = 0; b < B; ++b) m.variables.push_back({"S" + idx({us, ap, w, b}), VarKind::Binary});
    for (std::size_t us = 0; us < U; ++us)
        for (std::size_t ap = 0; ap < A; ++ap)
            for (std::size_t w = 0; w < W; ++w)
                for (std::size_t b = 0; b < B; ++b)
                    m.variables.push_back({"USINR" + idx({us, ap, w, b}), VarKind::Continuous});

    // phi(us, ui, ap, cp, w, b, f) = USINR(us, ap, w, b) * S(ui, cp, w, f)
    std::vector<std::size_t> first_product(U * A * W * B);
    for (std::size_t us = 0; us < U; ++us)
        for (std::size_t ap = 0; ap < A; ++ap)
            for (std::size_t w = 0; w < W; ++w)
                for (std::size_t b = 0; b < B; ++b) {
                    first_product[m.tuple(us, ap, w, b)] = m.products.size();
                    for (std::size_t ui = 0; ui < U; ++ui) {
                        if (ui == us) continue;
                        for (std::size_t cp = 0; cp < A; ++cp) {
                            if (cp == ap) continue;
                            for (std::size_t f = 0; f < B; ++f) {
                                const std::size_t var = m.variables.size();
                                m.variables.push_back(
                                    {"phi" + idx({us, ui, ap, cp, w, b, f}), VarKind::Continuous});
                                m.products.push_back({var, m.usinr(us, ap, w, b), m.selector(ui, cp, w, f)});
                            }
                        }
                    }
                }

    for (const auto& p : m.products) {
        const std::string& name = m.variables[p.var].name;
        const std::string suffix = name.substr(3);
        m.constraints.push_back({"lin_s" + suffix, {{p.var, 1.0}, {p.selector, -alpha}}, Sense::LessEqual, 0.0});
        m.constraints.push_back({"lin_u" + suffix, {{p.var, 1.0}, {p.usinr, -1.0}}, Sense::LessEqual, 0.0});
        m.constraints.push_back(
            {"lin_l" + suffix, {{p.var, 1.0}, {p.selector, -alpha}, {p.usinr, -1.0}}, Sense::GreaterEqual, -alpha});
    }

    // USINR * (sum over cp != ap of [P n + sigma (1 - n)] + sigma_Rx) = P S,
    // with n the number of other users holding (cp, w), written with phi.
    const double scale = 1.0 / m.balance_scale;
    for (std::size_t us = 0; us < U; ++us)
        for (std::size_t ap = 0; ap < A; ++ap)
            for (std::size_t w = 0; w < W; ++w)
                for (std::size_t b = 0; b < B; ++b) {
                    MilpConstraint row{"balance" + idx({us, ap, w, b}), {}, Sense::Equal, 0.0};
                    double denominator = 0.0;
                    std::size_t k = first_product[m.tuple(us, ap, w, b)];
                    for (std::size_t ui = 0; ui < U; ++ui) {
                        if (ui == us) continue;
                        for (std::size_t cp = 0; cp < A; ++cp) {
                            if (cp == ap) continue;
                            const double c = (pr.p(us, cp, w, b) - pr.bg(us, cp, w, b)) * scale;
                            for (std::size_t f = 0; f < B; ++f, ++k) {
                                if (c != 0.0) row.terms.push_back({m.products[k].var, c});
                            }
                        }
                    }
                    for (std::size_t cp = 0; cp < A; ++cp) {
                        if (cp != ap) denominator += pr.bg(us, cp, w, b);
                    }
                    denominator += pr.receiver_noise;
                    row.terms.push_back({m.usinr(us, ap, w, b), denominator * scale});
                    if (pr.p(us, ap, w, b) != 0.0) {
                        row.terms.push_back({m.selector(us, ap, w, b), -pr.p(us, ap, w, b) * scale});
                    }
                    m.constraints.push_back(std::move(row));
                }

    for (std::size_t ap = 0; ap < A; ++ap)
        for (std::size_t w = 0; w < W; ++w) {
            MilpConstraint row{"reuse" + idx({ap, w}), {}, Sense::LessEqual, 1.0};
            for (std::size_t us = 0; us < U; ++us)
                for (std::size_t b = 0; b < B; ++b) row.terms.push_back({m.selector(us, ap, w, b), 1.0});
            m.constraints.push_back(std::move(row));
        }
    for (std::size_t us = 0; us < U; ++us) {
        MilpConstraint row{"assign" + idx({us}), {}, Sense::Equal, 1.0};
        for (std::size_t ap = 0; ap < A; ++ap)
            for (std::size_t w = 0; w < W; ++w)
                for (std::size_t b = 0; b < B; ++b) row.terms.push_back({m.selector(us, ap, w, b), 1.0});
        m.constraints.push_back(std::move(row));
    }
    for (std::size_t us = 0; us < U; ++us)
        for (std::size_t ap = 0; ap < A; ++ap)
            for (std::size_t w = 0; w < W; ++w)
                for (std::size_t b = 0; b < B; ++b) {
                    m.constraints.push_back({"threshold" + idx({us, ap, w, b}),
                                             {{m.usinr(us, ap, w, b), 1.0}, {m.selector(us, ap, w, b), -pr.threshold}},
                                             Sense::GreaterEqual,
                                             0.0});
                }

    for (std::size_t t = 0; t < U * A * W * B; ++t) m.objective.push_back({U * A * W * B + t, 1.0});
    return m;
}

std::string export_lp(const MilpModel& model) {
    constexpr std::size_t kWrap = 200;
    std::string out;
    out.reserve(64 * (model.constraints.size() + model.variables.size()) + 64);
    std::size_t line_start = 0;

    auto wrap = [&] {
        if (out.size() - line_start > kWrap) {
            out += "\n   ";
            line_start = out.size() - 3;
        }
    };
    auto newline = [&] {
        out += '\n';
        line_start = out.size();
    };
    auto write_terms = [&](const std::vector<LinearTerm>& terms) {
        bool first = true;
        for (const auto& t : terms) {
            wrap();
            double c = t.coef;
            if (c < 0) {
                out += " - ";
                c = -c;
            } else if (!first) {
                out += " + ";
            } else {
                out += ' ';
            }
            if (c != 1.0) {
                append_number(out, c);
                out += ' ';
            }
            out += model.variables[t.var].name;
            first = false;
        }
        if (terms.empty()) out += " 0";
    };

    out += "\\ sum-SINR assignment model";
    newline();
    out += "Maximize";
    newline();
    out += " obj:";
    write_terms(model.objective);
    newline();
    out += "Subject To";
    newline();
    for (const auto& c : model.constraints) {
        out += ' ';
        out += c.name;
        out += ':';
        write_terms(c.terms);
        wrap();
        out += c.sense == Sense::LessEqual ? " <= " : c.sense == Sense::GreaterEqual ? " >= " : " = ";
        append_number(out, c.rhs);
        newline();
    }
    out += "Bounds";
    newline();
    for (const auto& v : model.variables) {
        if (v.kind != VarKind::Continuous) continue;
        out += ' ';
        out += v.name;
        out += " >= 0";
        newline();
    }
    bool any_binary = false;
    for (const auto& v : model.variables) {
        if (v.kind != VarKind::Binary) continue;
        if (!any_binary) {
            out += "Binary";
            newline();
            any_binary = true;
        }
        out += ' ';
        out += v.name;
        newline();
    }
    out += "End";
    newline();
    return out;
}

Substitution substitute_assignment(const MilpModel& model, const Assignment& assignment) {
    const std::size_t n = model.users * model.aps * model.wavelengths * model.branches;
    if (assignment.flat().size() != n) throw Error("assignment does not match the model dimensions");

    Substitution sub;
    sub.values.assign(model.variables.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) sub.values[i] = assignment.flat()[i];

    // With S fixed and binary, the big-M rows pin phi = USINR * S, so each
    // balance row is linear in its single USINR.
    const std::size_t phi_base = 2 * n;
    auto is_usinr = [&](std::size_t v) { return v >= n && v < phi_base; };
    for (const auto& c : model.constraints) {
        if (c.sense != Sense::Equal) continue;
        bool balance = false;
        std::size_t target = 0;
        double slope = 0.0;
        double constant = 0.0;
        for (const auto& t : c.terms) {
            if (t.var < n) {
                constant += t.coef * sub.values[t.var];
            } else if (is_usinr(t.var)) {
                if (balance && target != t.var) throw Error("row " + c.name + " couples several SINR variables");
                balance = true;
                target = t.var;
                slope += t.coef;
            } else {
                const auto& p = model.products[t.var - phi_base];
                if (balance && target != p.usinr) throw Error("row " + c.name + " couples several SINR variables");
                balance = true;
                target = p.usinr;
                slope += t.coef * sub.values[p.selector];
            }
        }
        if (!balance) continue;
        if (slope == 0.0) throw Error("row " + c.name + " does not determine its SINR variable");
        sub.values[target] = (c.rhs - constant) / slope;
    }
    for (const auto& p : model.products) sub.values[p.var] = sub.values[p.usinr] * sub.values[p.selector];

    for (const auto& c : model.constraints) {
        double lhs = 0.0;
        double magnitude = std::abs(c.rhs);
        for (const auto& t : c.terms) {
            const double v = t.coef * sub.values[t.var];
            lhs += v;
            magnitude += std::abs(v);
        }
        double excess = 0.0;
        if (c.sense == Sense::LessEqual) excess = std::max(0.0, lhs - c.rhs);
        if (c.sense == Sense::GreaterEqual) excess = std::max(0.0, c.rhs - lhs);
        if (c.sense == Sense::Equal) excess = std::abs(lhs - c.rhs);
        const double rel = magnitude > 0.0 ? excess / magnitude : excess;
        sub.max_violation = std::max(sub.max_violation, rel);
    }
    return sub;
}

double evaluate_objective(const MilpModel& model, const std::vector<double>& values) {
    double total = 0.0;
    for (const auto& t : model.objective) total += t.coef * values.at(t.var);
    return total;
}

}  // namespace vlcalloc
