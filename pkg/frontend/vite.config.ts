/// <reference types="vitest/config" />
import { defineConfig } from "vite";

// In dev mode the API lives on the python service; `abmkit serve --ui`
// serves the built bundle from the same origin so no proxy is involved.
export default defineConfig({
  build: {
    outDir: "dist",
    target: "es2020",
  },
  server: {
    proxy: {
      "/api": {
        target: "http://127.0.0.1:8000",
        ws: true,
      },
      "/healthz": "http://127.0.0.1:8000",
    },
  },
  test: {
    environment: "jsdom",
    setupFiles: ["./test/setup.ts"],
    testTimeout: 120_000,
    hookTimeout: 60_000,
    // the live-service test manages its own server process; run files
    // one at a time so two tests never race for the same port
    fileParallelism: false,
  },
});
