// Regenerates the replay fixtures under tests/data from the hand-written LLM script.
// Not part of the test run: fixtures are authored once and frozen.

#include "scripted_backend.hpp"

#include "devlore/manifest.hpp"
#include "devlore/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace devlore;
namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Author replay fixtures from a scripted model"};
  std::string manifest, scripts, fixtures, configs = "none;issue;stack+debug";
  bool clean = false;
  app.add_option("--manifest", manifest)->required();
  app.add_option("--scripts", scripts)->required();
  app.add_option("--fixtures", fixtures, "Directory receiving <prompt hash>.<n>.txt files")->required();
  app.add_option("--configs", configs)->capture_default_str();
  app.add_flag("--clean", clean, "Remove existing fixtures first");
  CLI11_PARSE(app, argc, argv);

  try {
    if (clean) fs::remove_all(fixtures);
    fs::create_directories(fixtures);
    auto script = std::make_shared<tooling::ScriptedBackend>(scripts);
    auto client = std::make_shared<LlmClient>(ModelConfig{}, std::make_shared<RecordingBackend>(script, fixtures));
    PipelineOptions options;
    options.jobs = 1;
    options.zero_timings = true;
    Pipeline pipeline(client, options);
    auto bugs = load_manifest(manifest);
    for (const auto& config : ArtifactConfig::parse_list(configs)) {
      for (const auto& bug : bugs) {
        script->set_trial(bug.id, config.label());
        auto r = pipeline.run_end_to_end(bug, config);
        std::cout << bug.id << " " << config.label() << ": "
                  << (!r.available ? "unavailable" : r.plausible() ? "plausible" : "unfixed") << " (" << r.usage.size()
                  << " samples)\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
