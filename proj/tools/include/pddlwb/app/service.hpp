// HTTP+JSON service over the workbench modules. Projects live in memory,
// keyed by id, each with a revision counter; every successful mutation bumps
// the revision and, when a data directory is configured, rewrites the
// project's XML snapshot there.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pddlwb/knowledge_base.hpp"
#include "pddlwb/planner.hpp"

namespace pddlwb::app {

struct ServiceConfig {
  /// Snapshot directory; empty disables persistence. Existing `*.kavi.xml`
  /// files are loaded at startup.
  std::string data_dir;
  kb::KnowledgeBase kb = kb::default_logistics_kb();
  std::vector<planner::PlannerPlugin> plugins;
  planner::SearchLimits limits;
};

class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Port 0 binds an ephemeral port.
  bool bind(const std::string& host, int port);
  int port() const;
  /// Blocks until stop().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pddlwb::app
