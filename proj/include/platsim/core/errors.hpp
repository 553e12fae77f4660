#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace platsim {

/// Every failure the library reports carries one of these codes.
enum class Errc {
  OutOfOrder,
  IllegalClick,
  DuplicateEvent,
  UnknownItem,
  AsymmetryViolation,
  SchemaError,
  DanglingRef,
  EmptyDataset,
  InvalidParams,
  ForeignItem,
  NotOwned,
  FutureItem,
  DeadCreator,
  EmptyGenres,
  SessionClosed,
  EmptyInteractions,
  NoCreatorsAtN0,
  NoExposures,
  BadDistribution,
  EmptyItems,
  ZeroBaseline,
  MissingVar,
  Timeout,
  HttpError,
  ExhaustedRetries,
  ParseFailure,
  ConfigError,
  DataError,
  MissingArtifact,
  CorruptLog,
  EmptyInput,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::OutOfOrder: return "OutOfOrder";
    case Errc::IllegalClick: return "IllegalClick";
    case Errc::DuplicateEvent: return "DuplicateEvent";
    case Errc::UnknownItem: return "UnknownItem";
    case Errc::AsymmetryViolation: return "AsymmetryViolation";
    case Errc::SchemaError: return "SchemaError";
    case Errc::DanglingRef: return "DanglingRef";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::ForeignItem: return "ForeignItem";
    case Errc::NotOwned: return "NotOwned";
    case Errc::FutureItem: return "FutureItem";
    case Errc::DeadCreator: return "DeadCreator";
    case Errc::EmptyGenres: return "EmptyGenres";
    case Errc::SessionClosed: return "SessionClosed";
    case Errc::EmptyInteractions: return "EmptyInteractions";
    case Errc::NoCreatorsAtN0: return "NoCreatorsAtN0";
    case Errc::NoExposures: return "NoExposures";
    case Errc::BadDistribution: return "BadDistribution";
    case Errc::EmptyItems: return "EmptyItems";
    case Errc::ZeroBaseline: return "ZeroBaseline";
    case Errc::MissingVar: return "MissingVar";
    case Errc::Timeout: return "Timeout";
    case Errc::HttpError: return "HttpError";
    case Errc::ExhaustedRetries: return "ExhaustedRetries";
    case Errc::ParseFailure: return "ParseFailure";
    case Errc::ConfigError: return "ConfigError";
    case Errc::DataError: return "DataError";
    case Errc::MissingArtifact: return "MissingArtifact";
    case Errc::CorruptLog: return "CorruptLog";
    case Errc::EmptyInput: return "EmptyInput";
  }
  return "Unknown";
}

class SimError : public std::runtime_error {
 public:
  SimError(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw SimError(code, what); }

}  // namespace platsim
