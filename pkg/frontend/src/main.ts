import { API_BASE } from "./config.js";
import { mountApp } from "./app.js";

const root = document.getElementById("app");
if (root) {
  mountApp(root, { apiBase: API_BASE });
}
