#include "tnp/results_io.hpp"

#include "tnp/calibration.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>

namespace tnp::io {

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

namespace {

double roundtrip(double v) { return std::strtod(format_real(v).c_str(), nullptr); }

}  // namespace

std::vector<DetailRow> detail_rows(const std::vector<ExperimentResult>& results) {
    std::vector<DetailRow> rows;
    for (const auto& result : results) {
        for (const auto& rep : result.repetitions) {
            for (Method method : result.config.methods) {
                const Metrics& m = rep.per_method.at(method);
                DetailRow row;
                row.config_id = result.config.id;
                row.method = method_name(method);
                row.rep = rep.rep;
                row.seed = rep.seed;
                row.type1 = roundtrip(m.type1);
                row.type2 = roundtrip(m.type2);
                row.accuracy = roundtrip(m.accuracy);
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

std::string detail_csv(const std::vector<DetailRow>& rows) {
    std::string out = "config_id,method,rep,seed,type1,type2,accuracy\n";
    for (const auto& r : rows) {
        out += r.config_id;
        out += ',';
        out += r.method;
        out += ',';
        out += std::to_string(r.rep);
        out += ',';
        out += std::to_string(r.seed);
        out += ',';
        out += format_real(r.type1);
        out += ',';
        out += format_real(r.type2);
        out += ',';
        out += format_real(r.accuracy);
        out += '\n';
    }
    return out;
}

std::vector<DetailRow> parse_detail_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "config_id,method,rep,seed,type1,type2,accuracy") {
        throw std::invalid_argument("detail csv: missing or malformed header");
    }
    std::vector<DetailRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string part;
        DetailRow row;
        auto next = [&](const char* what) {
            if (!std::getline(fields, part, ',')) {
                throw std::invalid_argument("detail csv line " + std::to_string(line_no) +
                                            ": missing field " + what);
            }
            return part;
        };
        row.config_id = next("config_id");
        row.method = next("method");
        row.rep = std::stoull(next("rep"));
        row.seed = std::stoull(next("seed"));
        row.type1 = std::stod(next("type1"));
        row.type2 = std::stod(next("type2"));
        row.accuracy = std::stod(next("accuracy"));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string aggregate_csv(const std::vector<DetailRow>& rows, double alpha) {
    struct Group {
        std::vector<double> type1, type2, accuracy;
    };
    std::vector<std::pair<std::string, std::string>> order;
    std::map<std::pair<std::string, std::string>, Group> groups;
    for (const auto& r : rows) {
        const auto key = std::make_pair(r.config_id, r.method);
        auto it = groups.find(key);
        if (it == groups.end()) {
            order.push_back(key);
            it = groups.emplace(key, Group{}).first;
        }
        it->second.type1.push_back(r.type1);
        it->second.type2.push_back(r.type2);
        it->second.accuracy.push_back(r.accuracy);
    }

    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    auto sd = [&](const std::vector<double>& v) {
        if (v.size() < 2) return 0.0;
        const double mu = mean(v);
        double s = 0.0;
        for (double x : v) s += (x - mu) * (x - mu);
        return std::sqrt(s / static_cast<double>(v.size() - 1));
    };

    std::string out =
        "config_id,method,mean_type1,sd_type1,mean_type2,sd_type2,mean_acc,sd_acc,"
        "violation_rate\n";
    for (const auto& key : order) {
        const Group& g = groups.at(key);
        out += key.first;
        out += ',';
        out += key.second;
        out += ',';
        out += format_real(mean(g.type1));
        out += ',';
        out += format_real(sd(g.type1));
        out += ',';
        out += format_real(mean(g.type2));
        out += ',';
        out += format_real(sd(g.type2));
        out += ',';
        out += format_real(mean(g.accuracy));
        out += ',';
        out += format_real(sd(g.accuracy));
        out += ',';
        out += format_real(violation_rate(g.type1, alpha));
        out += '\n';
    }
    return out;
}

}  // namespace tnp::io
