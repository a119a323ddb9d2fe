import { ApiClient } from "./api.js";
import { mountWizard } from "./render.js";

const root = document.getElementById("app");
if (root) {
  // Same-origin by default: the service serves these assets itself.
  mountWizard(root, new ApiClient(""), window.localStorage);
}
