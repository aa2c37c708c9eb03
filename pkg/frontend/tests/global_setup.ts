/** Spawns the real Python service once for the whole test run. */

import { spawn, ChildProcess } from "node:child_process";
import { createServer } from "node:net";
import { mkdirSync, writeFileSync, rmSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

const here = dirname(fileURLToPath(import.meta.url));
const fixtureDir = join(here, "..", ".fixture");

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = createServer();
    server.listen(0, "127.0.0.1", () => {
      const address = server.address();
      if (address && typeof address === "object") {
        const port = address.port;
        server.close(() => resolve(port));
      } else {
        reject(new Error("could not allocate a port"));
      }
    });
  });
}

async function waitForHealthz(port: number, timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`http://127.0.0.1:${port}/healthz`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error("fixture server did not become healthy in time");
}

let child: ChildProcess | null = null;

export async function setup(): Promise<void> {
  const port = await freePort();
  child = spawn("python3", [join(here, "fixture_server.py"), "--port", String(port)], {
    stdio: ["ignore", "inherit", "inherit"],
  });
  await waitForHealthz(port);
  mkdirSync(fixtureDir, { recursive: true });
  writeFileSync(join(fixtureDir, "port"), String(port), "utf-8");
}

export async function teardown(): Promise<void> {
  if (child && child.exitCode === null) {
    child.kill("SIGTERM");
    await new Promise((resolve) => setTimeout(resolve, 300));
    if (child.exitCode === null) child.kill("SIGKILL");
  }
  rmSync(fixtureDir, { recursive: true, force: true });
}
