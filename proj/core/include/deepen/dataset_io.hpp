#pragma once

#include <string>
#include <utility>
#include <vector>

#include "deepen/featurize.hpp"
#include "deepen/types.hpp"

namespace deepen {

// Cohort files are UTF-8 with one self-describing patient record per line;
// the manifest is a sibling JSON document. write/read round-trip bit-exactly
// on valid datasets.

void write_manifest(const std::string& path, const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::string& path);

void write_cohort(const std::string& path, const std::vector<PatientRecord>& records);

// Rejects malformed lines (with a line number) and records that fail
// validate_record. The manifest is validated against the canonical schema.
std::pair<std::vector<PatientRecord>, DatasetManifest> read_dataset(
    const std::string& dataset_path, const std::string& manifest_path);

void write_dataset(const std::string& dataset_path, const std::string& manifest_path,
                   const std::vector<PatientRecord>& records, const DatasetManifest& manifest);

// Featurized trajectories, one patient per line, in the same line-delimited
// idiom as the cohort file.
void write_transitions(const std::string& path, const TransitionDataset& dataset);
TransitionDataset read_transitions(const std::string& path, const std::string& manifest_path);

}  // namespace deepen
