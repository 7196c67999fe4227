import { QaClient } from "./api.js";
import { createApp } from "./ui.js";

const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app container");
}
createApp(root, new QaClient());
