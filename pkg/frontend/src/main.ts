import { App } from "./app";

const root = document.getElementById("app");
if (root !== null) {
  App.boot(root).catch((err: unknown) => {
    root.textContent = `failed to reach the steering service: ${String(err)}`;
  });
}
