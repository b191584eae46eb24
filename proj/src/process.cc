/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#include "gearbox/error.hh"
#include "gearbox/process.hh"

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char **environ;

namespace gearbox {

ProcessResult run_process(const std::string &cmd, const std::vector<std::string> &args,
                          const std::string &input, double timeout)
{
	int in_pipe[2], out_pipe[2];
	if (pipe2(in_pipe, O_CLOEXEC) || pipe2(out_pipe, O_CLOEXEC))
		throw Error(Errc::backend_launch_failure, std::string("pipe: ") + std::strerror(errno));
	posix_spawn_file_actions_t fa;
	posix_spawn_file_actions_init(&fa);
	posix_spawn_file_actions_adddup2(&fa, in_pipe[0], 0);
	posix_spawn_file_actions_adddup2(&fa, out_pipe[1], 1);
	posix_spawn_file_actions_addclose(&fa, in_pipe[1]);
	posix_spawn_file_actions_addclose(&fa, out_pipe[0]);
	std::vector<char *> argv;
	argv.push_back(const_cast<char *>(cmd.c_str()));
	for (const std::string &a : args)
		argv.push_back(const_cast<char *>(a.c_str()));
	argv.push_back(nullptr);
	pid_t pid;
	int rc = posix_spawnp(&pid, cmd.c_str(), &fa, nullptr, argv.data(), environ);
	posix_spawn_file_actions_destroy(&fa);
	close(in_pipe[0]);
	close(out_pipe[1]);
	if (rc != 0) {
		close(in_pipe[1]);
		close(out_pipe[0]);
		throw Error(Errc::backend_launch_failure,
		            "cannot start '" + cmd + "': " + std::strerror(rc));
	}
	/* the script is small; a blocking write cannot deadlock against a
	 * solver that only answers after reading all of its input */
	std::signal(SIGPIPE, SIG_IGN);
	size_t off = 0;
	while (off < input.size()) {
		ssize_t n = write(in_pipe[1], input.data() + off, input.size() - off);
		if (n <= 0)
			break;
		off += static_cast<size_t>(n);
	}
	close(in_pipe[1]);

	ProcessResult r;
	auto t0 = std::chrono::steady_clock::now();
	char buf[4096];
	while (true) {
		double left = timeout - std::chrono::duration<double>(
			std::chrono::steady_clock::now() - t0).count();
		if (left <= 0) {
			r.timed_out = true;
			kill(pid, SIGKILL);
			break;
		}
		pollfd pfd { out_pipe[0], POLLIN, 0 };
		int pr = poll(&pfd, 1, static_cast<int>(std::min(left, 1.0) * 1000) + 1);
		if (pr < 0 && errno == EINTR)
			continue;
		if (pr <= 0)
			continue;
		ssize_t n = read(out_pipe[0], buf, sizeof(buf));
		if (n <= 0)
			break;
		r.out.append(buf, static_cast<size_t>(n));
	}
	close(out_pipe[0]);
	waitpid(pid, &r.status, 0);
	return r;
}

}
