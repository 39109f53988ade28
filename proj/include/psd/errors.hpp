#pragma once

#include <stdexcept>
#include <string>

namespace psd {

// Malformed model input; `field` is a JSON-pointer-like location.
class ModelError : public std::runtime_error {
 public:
  ModelError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  [[nodiscard]] const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// A mathematical precondition of the pipeline failed on a well-formed model.
// `tag` names the violated condition (for example "hasse-surjectivity").
class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string tag, const std::string& message, std::string stage = {})
      : std::runtime_error((stage.empty() ? "" : stage + ": ") + "[" + tag + "] " + message),
        tag_(std::move(tag)),
        stage_(std::move(stage)),
        message_(message) {}
  [[nodiscard]] const std::string& tag() const { return tag_; }
  // Pipeline stage that raised the error; empty outside main_criterion.
  [[nodiscard]] const std::string& stage() const { return stage_; }
  [[nodiscard]] const std::string& message() const { return message_; }
  [[nodiscard]] PipelineError in_stage(std::string stage) const { return {tag_, message_, std::move(stage)}; }

 private:
  std::string tag_;
  std::string stage_;
  std::string message_;
};

}  // namespace psd
