import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    // the flow suite boots a real service process; give it room
    testTimeout: 60_000,
    hookTimeout: 60_000,
  },
});
