// Copyright 2026 The trajbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "trajbench/scene_io.hpp"

#include "trajbench/errors.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

namespace trajbench
{
namespace
{

using nlohmann::json;

json number(double v)
{
  return std::isnan(v) ? json(nullptr) : json(v);
}

double read_number(const json & j)
{
  if (j.is_null()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return j.get<double>();
}

json vec2(const Vec2 & v)
{
  return json::array({number(v.x()), number(v.y())});
}

Vec2 read_vec2(const json & j)
{
  if (!j.is_array() || j.size() != 2) {
    throw DataError("expected a 2-element array");
  }
  return {read_number(j[0]), read_number(j[1])};
}

json state_json(const AgentState & s)
{
  return json::array(
    {number(s.position.x()), number(s.position.y()), number(s.heading), number(s.velocity.x()),
     number(s.velocity.y()), number(s.speed), number(s.width), number(s.length), s.valid ? 1 : 0});
}

AgentState read_state(const json & j)
{
  if (!j.is_array() || j.size() != 9) {
    throw DataError("agent state must be a 9-element array");
  }
  AgentState s;
  s.position = {read_number(j[0]), read_number(j[1])};
  s.heading = read_number(j[2]);
  s.velocity = {read_number(j[3]), read_number(j[4])};
  s.speed = read_number(j[5]);
  s.width = read_number(j[6]);
  s.length = read_number(j[7]);
  const int valid = j[8].get<int>();
  if (valid != 0 && valid != 1) {
    throw DataError("valid flag must be 0 or 1");
  }
  s.valid = valid == 1;
  return s;
}

}  // namespace

std::string scene_to_json(const Scene & scene)
{
  json j;
  j["id"] = scene.id;
  j["dt"] = scene.dt;
  j["targets"] = scene.targets;
  auto road = json::array();
  for (const auto & poly : scene.road.polylines) {
    auto points = json::array();
    for (const auto & p : poly.points) {
      points.push_back(vec2(p));
    }
    road.push_back({{"type", std::string(to_string(poly.type))}, {"points", std::move(points)}});
  }
  j["road"] = std::move(road);
  auto tracks = json::array();
  for (const auto & t : scene.tracks) {
    json tj;
    tj["id"] = t.id;
    tj["type"] = std::string(to_string(t.type));
    tj["current_index"] = t.current_index;
    auto states = json::array();
    for (const auto & s : t.states) {
      states.push_back(state_json(s));
    }
    tj["states"] = std::move(states);
    auto truth = json::array();
    for (const auto & p : t.observed_truth) {
      truth.push_back(vec2(p));
    }
    tj["observed_truth"] = std::move(truth);
    auto deltas = json::array();
    for (const auto & d : t.deltas) {
      deltas.push_back(json::array(
        {number(d.position.x()), number(d.position.y()), number(d.heading), number(d.speed),
         number(d.validity)}));
    }
    tj["deltas"] = std::move(deltas);
    tracks.push_back(std::move(tj));
  }
  j["tracks"] = std::move(tracks);
  return j.dump();
}

Scene scene_from_json(const std::string & line)
{
  try {
    const auto j = json::parse(line);
    Scene scene;
    scene.id = j.at("id").get<std::string>();
    scene.dt = j.at("dt").get<double>();
    scene.targets = j.at("targets").get<std::vector<AgentId>>();
    for (const auto & pj : j.at("road")) {
      Polyline poly;
      poly.type = polyline_type_from_string(pj.at("type").get<std::string>());
      for (const auto & p : pj.at("points")) {
        poly.points.push_back(read_vec2(p));
      }
      scene.road.polylines.push_back(std::move(poly));
    }
    for (const auto & tj : j.at("tracks")) {
      AgentTrack t;
      t.id = tj.at("id").get<AgentId>();
      t.type = agent_type_from_string(tj.at("type").get<std::string>());
      t.current_index = tj.at("current_index").get<std::size_t>();
      for (const auto & s : tj.at("states")) {
        t.states.push_back(read_state(s));
      }
      if (tj.contains("observed_truth")) {
        for (const auto & p : tj.at("observed_truth")) {
          t.observed_truth.push_back(read_vec2(p));
        }
      }
      if (tj.contains("deltas")) {
        for (const auto & d : tj.at("deltas")) {
          if (!d.is_array() || d.size() != 5) {
            throw DataError("delta must be a 5-element array");
          }
          t.deltas.push_back(
            {{read_number(d[0]), read_number(d[1])}, read_number(d[2]), read_number(d[3]), read_number(d[4])});
        }
      }
      scene.tracks.push_back(std::move(t));
    }
    return scene;
  } catch (const json::exception & e) {
    throw DataError(e.what());
  } catch (const ConfigError & e) {
    throw DataError(e.what());
  }
}

void write_scenes(std::span<const Scene> scenes, std::ostream & out)
{
  json header;
  header["format"] = "trb-scenes";
  header["version"] = kSceneFormatVersion;
  header["count"] = scenes.size();
  out << header.dump() << '\n';
  for (const auto & s : scenes) {
    out << scene_to_json(s) << '\n';
  }
}

void write_scenes(std::span<const Scene> scenes, const std::filesystem::path & path)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open scene file for writing: " + path.string());
  }
  write_scenes(scenes, out);
  if (!out) {
    throw IoError("failed writing scene file: " + path.string());
  }
}

std::vector<Scene> read_scenes(std::istream & in)
{
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("line 1: missing scene file header");
  }
  std::size_t expected = 0;
  try {
    const auto header = json::parse(line);
    if (header.at("format").get<std::string>() != "trb-scenes") {
      throw DataError("line 1: not a scene file");
    }
    const int version = header.at("version").get<int>();
    if (version != kSceneFormatVersion) {
      throw DataError(
        "line 1: scene format version " + std::to_string(version) + " is not supported (expected " +
        std::to_string(kSceneFormatVersion) + ")");
    }
    expected = header.at("count").get<std::size_t>();
  } catch (const json::exception & e) {
    throw DataError(std::string("line 1: malformed header: ") + e.what());
  }
  std::vector<Scene> scenes;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) {
      continue;
    }
    try {
      scenes.push_back(scene_from_json(line));
    } catch (const DataError & e) {
      throw DataError("line " + std::to_string(number) + ": " + e.what());
    }
  }
  if (scenes.size() != expected) {
    throw DataError(
      "scene file declares " + std::to_string(expected) + " scenes but holds " + std::to_string(scenes.size()));
  }
  return scenes;
}

std::vector<Scene> read_scenes(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open scene file: " + path.string());
  }
  return read_scenes(in);
}

}  // namespace trajbench
