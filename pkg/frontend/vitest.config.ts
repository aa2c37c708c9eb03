import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    include: ["tests/**/*.test.ts"],
    globalSetup: ["tests/global_setup.ts"],
    testTimeout: 30_000,
    hookTimeout: 60_000,
  },
});
