/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#pragma once

#include <string>
#include <vector>

namespace gearbox {

struct ProcessResult {
	std::string out;
	bool timed_out = false;
	int status = 0; /* as returned by waitpid */
};

/* Runs cmd (looked up in PATH) with args, feeds input on stdin and collects
 * stdout until exit or timeout seconds, after which the child is killed.
 * Throws Error(backend_launch_failure) when the process cannot start. Safe
 * to call from several threads. */
ProcessResult run_process(const std::string &cmd, const std::vector<std::string> &args,
                          const std::string &input, double timeout);

}
