/*
 * Copyright 2026 The rcmdp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "rcmdp/io.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rcmdp {

using nlohmann::json;

std::string model_to_json(const Rcmdp& m, int indent) {
    json doc;
    doc["n_states"] = m.n_states;
    doc["n_actions"] = m.n_actions;
    doc["gamma"] = m.gamma;
    doc["horizon"] = m.horizon ? json(*m.horizon) : json(nullptr);
    doc["beta"] = m.beta;
    doc["p0"] = m.p0;
    doc["rewards"] = m.rewards;
    doc["constraint_rewards"] = m.constraint_rewards;
    doc["nominal"] = m.nominal;
    doc["budgets"] = m.budgets;
    return doc.dump(indent);
}

Rcmdp model_from_json(const std::string& text) {
    try {
        const json doc = json::parse(text);
        Rcmdp m;
        m.n_states = doc.at("n_states").get<std::size_t>();
        m.n_actions = doc.at("n_actions").get<std::size_t>();
        m.gamma = doc.at("gamma").get<double>();
        const auto& horizon = doc.at("horizon");
        if (!horizon.is_null()) m.horizon = horizon.get<std::size_t>();
        m.beta = doc.at("beta").get<double>();
        m.p0 = doc.at("p0").get<Vec>();
        m.rewards = doc.at("rewards").get<Tensor3>();
        m.constraint_rewards = doc.at("constraint_rewards").get<Tensor3>();
        m.nominal = doc.at("nominal").get<Tensor3>();
        m.budgets = doc.at("budgets").get<Matrix>();
        return m;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed model document: ") + e.what());
    }
}

void save_model(const std::string& path, const Rcmdp& model) {
    write_file_atomic(path, model_to_json(model, 1) + "\n");
}

Rcmdp load_model(const std::string& path) { return model_from_json(read_file(path)); }

void write_file_atomic(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
        out << contents;
        if (!out.flush()) throw std::runtime_error("failed writing '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace rcmdp
