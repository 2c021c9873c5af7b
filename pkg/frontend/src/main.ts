// Boot and hash routing: #/ lists recordings, #/bag/<id> opens the
// annotation workspace. The API base is same-origin unless the page
// sets ROSANN_API_BASE (dev server talking to a separate backend).

import { ApiClient } from "./api.js";
import { buildImportPage, buildWorkspacePage } from "./app.js";
import { clear } from "./dom.js";

const api = new ApiClient(
  (globalThis as { ROSANN_API_BASE?: string }).ROSANN_API_BASE ?? "",
);

function route(): void {
  const app = document.getElementById("app");
  if (!app) return;
  clear(app);
  const match = /^#\/bag\/(.+)$/.exec(location.hash);
  if (match) {
    void buildWorkspacePage(api, decodeURIComponent(match[1]!), app).catch((err) => {
      app.textContent = `failed to open workspace: ${err instanceof Error ? err.message : err}`;
    });
  } else {
    buildImportPage(api, app, (bagId) => {
      location.hash = `#/bag/${encodeURIComponent(bagId)}`;
    });
  }
}

window.addEventListener("hashchange", route);
route();
