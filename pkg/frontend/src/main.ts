import "./style.css";
import { initSearchPage } from "./controller";

const app = document.getElementById("app");
if (!app) {
  throw new Error("missing #app mount point");
}
initSearchPage(app);
