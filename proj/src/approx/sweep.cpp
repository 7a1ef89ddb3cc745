// Copyright 2026 The heact Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <chrono>

#include "heact/approx.hpp"
#include "heact/error.hpp"
#include "heact/eval.hpp"
#include "heact/he/ckks.hpp"
#include "heact/he/serialize.hpp"
#include "heact/json_format.hpp"

namespace heact::approx {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

std::vector<SweepRow> degree_sweep(std::span<const double> train, std::span<const double> val,
                                   const std::vector<int>& degrees, double lambda, const he::CkksParams& he_params,
                                   const SweepOptions& opts) {
    if (degrees.empty()) throw ParameterError("degree_sweep: no degrees given");
    for (int d : degrees) {
        if (d < 1) throw ParameterError("degree_sweep: degrees must be >= 1");
    }
    if (train.empty() || val.empty()) throw ParameterError("degree_sweep: empty sample set");

    const auto t_kernel = Clock::now();
    const auto support = subsample(train, kSupportCap, kSupportSeed);
    std::vector<double> targets(support.size());
    std::transform(support.begin(), support.end(), targets.begin(), poly::relu);
    const KernelModel kernel = fit_kernel_ridge(support, targets, lambda);
    const double kernel_seconds = seconds_since(t_kernel);

    he::CkksBackend backend(he_params, opts.key_seed);
    const std::size_t slots = he_params.slot_count();
    const int top = he_params.max_level();
    std::vector<he::Ciphertext> inputs;
    for (std::size_t off = 0; off < val.size(); off += slots) {
        const auto chunk = val.subspan(off, std::min(slots, val.size() - off));
        inputs.push_back(backend.encrypt(backend.encode(chunk, top)));
    }
    std::vector<double> truth(val.size());
    std::transform(val.begin(), val.end(), truth.begin(), poly::relu);

    std::vector<SweepRow> rows;
    for (int degree : degrees) {
        SweepRow row;
        const auto t_row = Clock::now();
        row.fit = fit_on_smoother(kernel, val, degree).report;
        row.cost.levels = poly::mult_depth(degree);
        if (row.cost.levels > top) {
            row.cost.status = kDepthExceeded;
            rows.push_back(std::move(row));
            continue;
        }
        const poly::Polynomial& p = row.fit.polynomial;
        std::vector<double> decrypted;
        decrypted.reserve(val.size());
        he::Ciphertext first;
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            const auto out = backend.eval_poly(inputs[i], p);
            const auto dec = backend.decode(backend.decrypt(out));
            const std::size_t take = std::min(slots, val.size() - decrypted.size());
            decrypted.insert(decrypted.end(), dec.begin(), dec.begin() + static_cast<std::ptrdiff_t>(take));
            if (i == 0) first = out;
        }
        row.cost.enc_mse = eval::mse(decrypted, truth);
        row.cost.ct_bytes = he::ct_bytes(first);
        row.cost.total_s = kernel_seconds + seconds_since(t_row);
        row.cost.enc_latency_s =
            eval::measure([&] { (void)backend.eval_poly(inputs[0], p); }, std::max(3, opts.repetitions)).median_s;
        rows.push_back(std::move(row));
    }

    const int sel = select_degree(rows);
    if (sel >= 0) rows[static_cast<std::size_t>(sel)].selected = true;
    return rows;
}

int select_degree(const std::vector<SweepRow>& rows) {
    double best = INFINITY;
    for (const auto& r : rows) {
        if (r.cost.status == "ok") best = std::min(best, r.fit.val_mse);
    }
    int chosen = -1;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.cost.status != "ok" || r.fit.val_mse > 1.05 * best) continue;
        if (chosen < 0 || r.fit.degree < rows[static_cast<std::size_t>(chosen)].fit.degree) chosen = static_cast<int>(i);
    }
    return chosen;
}

const std::vector<std::string>& sweep_columns() {
    static const std::vector<std::string> cols{"degree",        "coeffs",  "train_mse", "val_mse",
                                               "enc_mse",       "levels",  "enc_latency_s",
                                               "total_s",       "ct_bytes", "selected", "status"};
    return cols;
}

nlohmann::json sweep_to_json(const std::vector<SweepRow>& rows, bool include_timing) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j;
        j["degree"] = r.fit.degree;
        j["coeffs"] = r.fit.polynomial.coeffs();
        j["train_mse"] = r.fit.train_mse;
        j["val_mse"] = r.fit.val_mse;
        j["enc_mse"] = r.cost.enc_mse;
        j["levels"] = r.cost.levels;
        j["enc_latency_s"] = include_timing ? r.cost.enc_latency_s : 0.0;
        j["total_s"] = include_timing ? r.cost.total_s : 0.0;
        j["ct_bytes"] = r.cost.ct_bytes;
        j["selected"] = r.selected;
        j["status"] = r.cost.status;
        out.push_back(std::move(j));
    }
    return out;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows, bool include_timing) {
    std::string out;
    const auto& cols = sweep_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
    out += "\n";
    for (const auto& r : rows) {
        std::string coeffs;
        for (double c : r.fit.polynomial.coeffs()) coeffs += (coeffs.empty() ? "" : ";") + format_fixed(c, 6);
        out += std::to_string(r.fit.degree) + "," + coeffs + "," + format_fixed(r.fit.train_mse, 6) + "," +
               format_fixed(r.fit.val_mse, 6) + "," + format_fixed(r.cost.enc_mse, 6) + "," +
               std::to_string(r.cost.levels) + "," + format_fixed(include_timing ? r.cost.enc_latency_s : 0.0, 6) +
               "," + format_fixed(include_timing ? r.cost.total_s : 0.0, 6) + "," + std::to_string(r.cost.ct_bytes) +
               "," + (r.selected ? "true" : "false") + "," + r.cost.status + "\n";
    }
    return out;
}

nlohmann::json fit_report_to_json(const FitReport& r, bool include_timing) {
    nlohmann::json j;
    j["degree"] = r.degree;
    j["polynomial"] = poly::to_json(r.polynomial);
    j["train_mse"] = r.train_mse;
    j["val_mse"] = r.val_mse;
    j["design_condition"] = r.design_condition;
    j["fit_seconds"] = include_timing ? r.fit_seconds : 0.0;
    return j;
}

}  // namespace heact::approx
