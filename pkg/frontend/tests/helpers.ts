import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

import { ApiClient } from "../src/api.js";

const here = dirname(fileURLToPath(import.meta.url));

export function baseUrl(): string {
  const port = readFileSync(join(here, "..", ".fixture", "port"), "utf-8").trim();
  return `http://127.0.0.1:${port}`;
}

export async function facultyClient(): Promise<ApiClient> {
  const client = new ApiClient(baseUrl());
  await client.login("prof", "prof-pass");
  return client;
}

export async function studentClient(sid: string): Promise<ApiClient> {
  const client = new ApiClient(baseUrl());
  await client.login(sid, `${sid}-pass`);
  return client;
}
